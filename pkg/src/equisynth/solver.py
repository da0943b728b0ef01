"""Synthesis on the epistemic game: find a payoff vector the suggested
coalition can lock in, together with the strategy that enforces it.

For a candidate vector p the deviated region is solved as a zero-sum game
where the protagonist must keep every surviving suspect at or below its
component of p on the recurring vertices.  Suspect sets only shrink, so the
region splits into layers ordered by the suspect set; each layer becomes a
parity game through a latest-appearance record over the layer's vertices,
grouped into payoff-equivalence classes (the grouping is verified
exhaustively against the acceptance predicate before use).  Exits to smaller
layers are sinks whose winner is already known.

On top of the punished region, a complying move is p-safe when every visible
deviation it admits lands in the won region.  The main outcome is then a
lasso over p-safe moves whose recurring vertex set evaluates to exactly p;
candidate recurring sets are enumerated per strongly connected component of
the p-safe graph, smallest first.

`model_check_strategy` re-verifies any strategy against the epistemic game:
the unique complying outcome must pay exactly p, and every recurring color
set reachable in the deviated product must satisfy the bound for every
surviving suspect.  Recurring color sets are enumerated exactly: a set CC
recurs iff, after restricting a component to CC-colored nodes, some strongly
connected part with an edge still shows every color of CC.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .epistemic import EpistemicGame, EveAction, state_key
from .errors import CapExceeded, InvalidInput, LarCapExceeded, StateCapExceeded, StrategyUndefined
from .game import ConcurrentGame
from .lar import LarState, initial_record, lar_priority, lar_step
from .parity import ParityGame, solve_parity

Vector = tuple[Fraction, ...]
DevKey = tuple[str, ...]


def candidate_payoffs(game: ConcurrentGame, query=None) -> list[Vector]:
    """Payoff vectors worth trying: the rule vectors plus the default, in
    rule order, filtered by the query predicate."""
    vectors = game.payoff.vectors()
    if query is not None:
        vectors = [v for v in vectors if query.matches(v)]
    return vectors


# ---------------------------------------------------------------------------
# Generic iterative SCC decomposition (Tarjan).


def strongly_connected_components(n: int, succ: list[list[int]]) -> list[list[int]]:
    index = [0] * n
    low = [0] * n
    on_stack = [False] * n
    visited = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 1
    for root in range(n):
        if visited[root]:
            continue
        work = [(root, 0)]
        while work:
            v, ei = work[-1]
            if ei == 0:
                visited[v] = True
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            while ei < len(succ[v]):
                w = succ[v][ei]
                ei += 1
                if not visited[w]:
                    work[-1] = (v, ei)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
            if work:
                parent, _ = work[-1]
                low[parent] = min(low[parent], low[v])
    return comps


# ---------------------------------------------------------------------------
# Punishment region, layer by layer.


@dataclass
class LayerTable:
    dev: DevKey
    classes: tuple[tuple[str, ...], ...]  # color id -> vertices of that class
    entries: dict[tuple[int, LarState], int]  # (eve id, record) -> adam id
    win: frozenset[int]

    def class_of(self) -> dict[str, int]:
        return {v: ci for ci, cls in enumerate(self.classes) for v in cls}

    def entry_state(self, color: int) -> LarState:
        return lar_step(LarState(initial_record(len(self.classes)), 0), color)


@dataclass
class PunishmentSolution:
    payoff: Vector
    win: frozenset[int]
    layers: dict[DevKey, LayerTable]


def _layer_color_classes(game: ConcurrentGame, p: Vector, dev: DevKey,
                         layer_vertices: list[str]):
    """Partition the layer's vertices so the acceptance predicate depends only
    on which classes recur; verified over every vertex subset, then coarsened
    greedily while the verification keeps passing."""
    dev_idx = [game.player_index[d] for d in dev]
    atoms = game.payoff.atoms()
    vorder = {v: i for i, v in enumerate(game.vertices)}

    def accepted(subset: frozenset[str]) -> bool:
        vec = game.payoff.value(subset)
        return all(vec[i] <= p[i] for i in dev_idx)

    def verify(partition: list[list[str]]):
        cls_of = {v: ci for ci, cls in enumerate(partition) for v in cls}
        table: dict[frozenset[int], bool] = {}
        n = len(layer_vertices)
        for mask in range(1, 1 << n):
            subset = frozenset(
                v for i, v in enumerate(layer_vertices) if mask >> i & 1
            )
            key = frozenset(cls_of[v] for v in subset)
            val = accepted(subset)
            if table.setdefault(key, val) != val:
                return None
        return table

    partition = [[v] for v in layer_vertices if v in atoms]
    rest = [v for v in layer_vertices if v not in atoms]
    if rest:
        partition.append(rest)
    partition.sort(key=lambda cls: vorder[cls[0]])
    table = verify(partition)
    if table is None:  # cannot happen: atom singletons decide the payoff
        raise RuntimeError("payoff-class seed partition inconsistent")
    merged = True
    while merged:
        merged = False
        for i in range(len(partition)):
            for j in range(i + 1, len(partition)):
                cand = [cls for k, cls in enumerate(partition) if k not in (i, j)]
                cand.append(sorted(partition[i] + partition[j], key=vorder.__getitem__))
                cand.sort(key=lambda cls: vorder[cls[0]])
                t = verify(cand)
                if t is not None:
                    partition, table = cand, t
                    merged = True
                    break
            if merged:
                break
    classes = tuple(tuple(cls) for cls in partition)
    cls_of = {v: ci for ci, cls in enumerate(classes) for v in cls}
    return classes, cls_of, table


def _solve_layer(eg: EpistemicGame, p: Vector, dev: DevKey, layer_eves: list[int],
                 global_win: set[int], lar_cap: int) -> LayerTable:
    game = eg.game
    vorder = {v: i for i, v in enumerate(game.vertices)}
    layer_vertices = sorted(
        {eg.eve_states[e].vertex for e in layer_eves}, key=vorder.__getitem__
    )
    classes, cls_of, acc_table = _layer_color_classes(game, p, dev, layer_vertices)
    k = len(classes)
    accept = acc_table.__getitem__

    base = LarState(initial_record(k), 0)

    def entry_ls(e: int) -> LarState:
        return lar_step(base, cls_of[eg.eve_states[e].vertex])

    layer_set = set(layer_eves)
    owner: list[int] = [0, 1]  # 0: win sink, 1: lose sink
    priority: list[int] = [0, 1]
    succ: list[list[int]] = [[0], [1]]
    labels: list = [None, None]
    index: dict = {}
    WIN, LOSE = 0, 1

    def intern(node) -> int:
        i = index.get(node)
        if i is None:
            if len(owner) >= lar_cap:
                raise LarCapExceeded(
                    f"record product exceeded {lar_cap} nodes in layer {dev}"
                )
            i = len(owner)
            index[node] = i
            labels.append(node)
            if node[0] == "e":
                owner.append(0)
                priority.append(lar_priority(node[2], accept))
            else:
                owner.append(1)
                priority.append(0)
            succ.append([])
            queue.append(node)
        return i

    queue: deque = deque()
    entry_nodes = {e: ("e", e, entry_ls(e)) for e in layer_eves}
    for e in layer_eves:
        intern(entry_nodes[e])
    while queue:
        node = queue.popleft()
        nid = index[node]
        if node[0] == "e":
            _, e, ls = node
            for aid in eg.eve_succ[e]:
                succ[nid].append(intern(("a", aid, ls)))
        else:
            _, aid, ls = node
            for _t, sid in eg.adam_nodes[aid].succ:
                if sid in layer_set:
                    nxt = ("e", sid, lar_step(ls, cls_of[eg.eve_states[sid].vertex]))
                    succ[nid].append(intern(nxt))
                else:
                    succ[nid].append(WIN if sid in global_win else LOSE)

    w0, _w1, s0, _s1 = solve_parity(ParityGame(owner, priority, succ))
    entries: dict[tuple[int, LarState], int] = {}
    for node, nid in index.items():
        if node[0] != "e" or nid not in w0:
            continue
        choice = s0.get(nid)
        if choice is None:
            raise RuntimeError(f"missing strategy on won node {node}")
        target = labels[choice]
        entries[(node[1], node[2])] = target[1]
    win = frozenset(
        e for e in layer_eves if index[entry_nodes[e]] in w0
    )
    return LayerTable(dev=dev, classes=classes, entries=entries, win=win)


def punishment_region(eg: EpistemicGame, p: Vector, lar_cap: int = 500_000) -> PunishmentSolution:
    """Deviated Eve states from which the coalition can bound every surviving
    suspect by p on every outcome, with the enforcing strategy tables."""
    groups: dict[DevKey, list[int]] = {}
    for eid in eg.deviated_ids():
        groups.setdefault(eg.eve_states[eid].deviators(), []).append(eid)
    global_win: set[int] = set()
    layers: dict[DevKey, LayerTable] = {}
    for dev in sorted(groups, key=lambda d: (len(d), d)):
        table = _solve_layer(eg, p, dev, groups[dev], global_win, lar_cap)
        layers[dev] = table
        global_win |= table.win
    return PunishmentSolution(payoff=p, win=frozenset(global_win), layers=layers)


# ---------------------------------------------------------------------------
# Full synthesis: p-safe complying lasso + punishment tables.


@dataclass
class EveStrategy:
    """Finite-memory protagonist strategy: follow the complying lasso, and on
    any visible deviation switch to the punished layer's record-based table."""

    eg: EpistemicGame
    payoff: Vector
    prefix: tuple[tuple[int, int], ...]  # (eve id, adam id) along the stem
    cycle: tuple[tuple[int, int], ...]  # (eve id, adam id) around the loop
    layers: dict[DevKey, LayerTable]

    # -- policy protocol -------------------------------------------------
    def initial(self):
        return ("c", 0)

    def _comply_entry(self, pos: int) -> tuple[int, int]:
        if pos < len(self.prefix):
            return self.prefix[pos]
        return self.cycle[(pos - len(self.prefix)) % len(self.cycle)]

    def action(self, eve_id: int, mem) -> EveAction:
        if mem[0] == "c":
            entry_eve, aid = self._comply_entry(mem[1])
            if entry_eve != eve_id:
                raise StrategyUndefined(
                    f"complying track expected state {entry_eve}, got {eve_id}"
                )
            return self.eg.adam_nodes[aid].action
        _tag, dev, ls = mem
        table = self.layers.get(dev)
        if table is None:
            raise StrategyUndefined(f"no punishment table for suspects {dev}")
        aid = table.entries.get((eve_id, ls))
        if aid is None:
            raise StrategyUndefined(
                f"punishment table for {dev} undefined at "
                f"{state_key(self.eg.eve_states[eve_id])} with record {ls}"
            )
        return self.eg.adam_nodes[aid].action

    def advance(self, mem, eve_id: int, action: EveAction, next_eve_id: int):
        nxt = self.eg.eve_states[next_eve_id]
        if mem[0] == "c":
            if not nxt.deviated:
                pos = mem[1] + 1
                if pos >= len(self.prefix) + len(self.cycle):
                    pos = len(self.prefix)
                return ("c", pos)
            return self._enter_layer(next_eve_id)
        _tag, dev, ls = mem
        if nxt.deviators() == dev:
            table = self.layers[dev]
            color = table.class_of()[nxt.vertex]
            return ("p", dev, lar_step(ls, color))
        return self._enter_layer(next_eve_id)

    def _enter_layer(self, eve_id: int):
        state = self.eg.eve_states[eve_id]
        dev = state.deviators()
        table = self.layers.get(dev)
        if table is None:
            raise StrategyUndefined(f"no punishment table for suspects {dev}")
        color = table.class_of()[state.vertex]
        return ("p", dev, table.entry_state(color))

    # -- serialization ----------------------------------------------------
    def to_dict(self) -> dict:
        eg = self.eg

        def action_json(action: EveAction):
            if action and isinstance(action[0], tuple):
                return {d: list(m) for d, m in action}
            return list(action)

        def comply_json(entries):
            return [
                {
                    "eve": e,
                    "key": state_key(eg.eve_states[e]),
                    "action": action_json(eg.adam_nodes[aid].action),
                }
                for e, aid in entries
            ]

        layers = []
        for dev in sorted(self.layers):
            table = self.layers[dev]
            rows = []
            for (e, ls), aid in sorted(
                table.entries.items(), key=lambda kv: (kv[0][0], kv[0][1].record, kv[0][1].hit)
            ):
                rows.append(
                    {
                        "eve": e,
                        "key": state_key(eg.eve_states[e]),
                        "record": list(ls.record),
                        "hit": ls.hit,
                        "action": action_json(eg.adam_nodes[aid].action),
                    }
                )
            layers.append(
                {
                    "dev": list(dev),
                    "classes": [list(cls) for cls in table.classes],
                    "win": sorted(table.win),
                    "entries": rows,
                }
            )
        return {
            "format": "equisynth-profile-v1",
            "payoff": [str(q) for q in self.payoff],
            "comply": {
                "prefix": comply_json(self.prefix),
                "cycle": comply_json(self.cycle),
            },
            "punish": layers,
        }

    @staticmethod
    def from_dict(eg: EpistemicGame, data: dict) -> "EveStrategy":
        if data.get("format") != "equisynth-profile-v1":
            raise InvalidInput("unknown profile format")

        def action_of(raw, eve_id) -> EveAction:
            state = eg.eve_states[eve_id]
            if isinstance(raw, dict):
                try:
                    return tuple(
                        (d, tuple(raw[d])) for d in state.deviators()
                    )
                except KeyError as exc:
                    raise InvalidInput(f"profile action misses suspect {exc}") from exc
            return tuple(raw)

        def comply_of(rows):
            out = []
            for row in rows:
                e = int(row["eve"])
                if not 0 <= e < eg.eve_count() or state_key(eg.eve_states[e]) != row["key"]:
                    raise InvalidInput("profile does not match the built game")
                aid = eg.adam_for_action(e, action_of(row["action"], e))
                out.append((e, aid))
            return tuple(out)

        payoff = tuple(Fraction(x) for x in data["payoff"])
        prefix = comply_of(data["comply"]["prefix"])
        cycle = comply_of(data["comply"]["cycle"])
        if not cycle:
            raise InvalidInput("profile complying cycle is empty")
        layers: dict[DevKey, LayerTable] = {}
        for block in data.get("punish", []):
            dev = tuple(block["dev"])
            classes = tuple(tuple(cls) for cls in block["classes"])
            entries: dict[tuple[int, LarState], int] = {}
            for row in block["entries"]:
                e = int(row["eve"])
                if not 0 <= e < eg.eve_count() or state_key(eg.eve_states[e]) != row["key"]:
                    raise InvalidInput("profile does not match the built game")
                ls = LarState(tuple(row["record"]), int(row["hit"]))
                entries[(e, ls)] = eg.adam_for_action(e, action_of(row["action"], e))
            layers[dev] = LayerTable(
                dev=dev,
                classes=classes,
                entries=entries,
                win=frozenset(int(x) for x in block.get("win", [])),
            )
        return EveStrategy(eg=eg, payoff=payoff, prefix=prefix, cycle=cycle, layers=layers)


@dataclass
class SolveResult:
    payoff: Vector
    strategy: EveStrategy
    lasso_prefix: tuple[str, ...]
    lasso_cycle: tuple[str, ...]
    candidates_tried: list[Vector]


def _subsets_smallest_first(members: list[int], limit: int = 20) -> Iterable[tuple[int, ...]]:
    from itertools import combinations

    if len(members) > limit:
        raise CapExceeded(
            f"recurring-set search over a {len(members)}-state component "
            f"exceeds the {limit}-state cap"
        )
    for size in range(1, len(members) + 1):
        yield from combinations(members, size)


def solve(
    eg: EpistemicGame,
    query=None,
    main_inf: Optional[frozenset[str]] = None,
    lar_cap: int = 500_000,
) -> Optional[SolveResult]:
    """Try each candidate payoff in order; return the first enforceable one.

    A result bundles the complying lasso over p-safe moves and the punishment
    tables the lasso's safety relies on.  `main_inf` additionally requires
    the complying outcome to visit infinitely often exactly that vertex set.
    """
    tried: list[Vector] = []
    for p in candidate_payoffs(eg.game, query):
        tried.append(p)
        punish = punishment_region(eg, p, lar_cap)
        result = _find_lasso(eg, p, punish, main_inf)
        if result is not None:
            prefix, cycle = result
            states = eg.eve_states
            strategy = EveStrategy(
                eg=eg, payoff=p, prefix=prefix, cycle=cycle, layers=punish.layers
            )
            return SolveResult(
                payoff=p,
                strategy=strategy,
                lasso_prefix=tuple(states[e].vertex for e, _ in prefix),
                lasso_cycle=tuple(states[e].vertex for e, _ in cycle),
                candidates_tried=tried,
            )
    return None


def _find_lasso(eg: EpistemicGame, p: Vector, punish: PunishmentSolution,
                main_inf: Optional[frozenset[str]]):
    states = eg.eve_states
    # p-safe complying edges: every visible deviation falls into the won region.
    safe_succ: dict[int, dict[int, int]] = {}
    for e in range(eg.eve_count()):
        if states[e].deviated:
            continue
        row: dict[int, int] = {}
        for aid in eg.eve_succ[e]:
            node = eg.adam_nodes[aid]
            if all(
                sid in punish.win
                for _t, sid in node.succ
                if states[sid].deviated
            ):
                row.setdefault(node.comply, aid)
        safe_succ[e] = row

    # Reachable part of the p-safe graph.
    reach: list[int] = []
    seen = {eg.init}
    queue = deque([eg.init])
    while queue:
        e = queue.popleft()
        reach.append(e)
        for t in safe_succ[e]:
            if t not in seen:
                seen.add(t)
                queue.append(t)

    ids = {e: i for i, e in enumerate(reach)}
    adj = [[ids[t] for t in sorted(safe_succ[e])] for e in reach]
    for comp in strongly_connected_components(len(reach), adj):
        members = [reach[i] for i in comp]
        for subset in _subsets_smallest_first(members):
            sub = set(subset)
            if not _strongly_connected_with_edge(sub, safe_succ):
                continue
            verts = frozenset(states[e].vertex for e in subset)
            if eg.game.payoff.value(verts) != p:
                continue
            if main_inf is not None and verts != main_inf:
                continue
            return _build_lasso(eg, safe_succ, sub)
    return None


def _strongly_connected_with_edge(sub: set[int], safe_succ) -> bool:
    edges_in = {e: [t for t in safe_succ[e] if t in sub] for e in sub}
    if not any(edges_in.values()):
        return False
    if len(sub) == 1:
        (e,) = sub
        return e in edges_in[e]
    start = next(iter(sorted(sub)))
    for mapping in (edges_in, _reversed(edges_in)):
        seen = {start}
        queue = [start]
        while queue:
            x = queue.pop()
            for t in mapping[x]:
                if t not in seen:
                    seen.add(t)
                    queue.append(t)
        if seen != sub:
            return False
    return True


def _reversed(mapping: dict[int, list[int]]) -> dict[int, list[int]]:
    rev: dict[int, list[int]] = {e: [] for e in mapping}
    for e, ts in mapping.items():
        for t in ts:
            rev[t].append(e)
    return rev


def _bfs_path(src: int, dst, succ_of) -> list[int]:
    """Vertex path src..dst (dst may be a set); deterministic BFS."""
    targets = dst if isinstance(dst, set) else {dst}
    prev = {src: None}
    queue = deque([src])
    found = src if src in targets else None
    while queue and found is None:
        x = queue.popleft()
        for t in succ_of(x):
            if t not in prev:
                prev[t] = x
                if t in targets:
                    found = t
                    break
                queue.append(t)
    if found is None:
        raise RuntimeError("no path in p-safe graph")
    path = [found]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    path.reverse()
    return path


def _build_lasso(eg: EpistemicGame, safe_succ, sub: set[int]):
    order = sorted(sub)
    stem_path = _bfs_path(eg.init, sub, lambda e: sorted(safe_succ[e]))
    s0 = stem_path[-1]
    prefix = tuple(
        (e, safe_succ[e][t]) for e, t in zip(stem_path, stem_path[1:])
    )
    inside = lambda e: sorted(t for t in safe_succ[e] if t in sub)
    walk = [s0]
    cur = s0
    for target in [e for e in order if e != s0] + [s0]:
        leg = _bfs_path(cur, target, inside)
        walk.extend(leg[1:])
        cur = target
    if len(walk) == 1:  # single state: use its self-loop
        walk.append(s0)
    cycle = tuple((e, safe_succ[e][t]) for e, t in zip(walk, walk[1:]))
    return prefix, cycle


# ---------------------------------------------------------------------------
# Independent verification of a strategy on the epistemic game.


@dataclass
class ModelCheckReport:
    ok: bool
    complying_prefix: tuple[str, ...]
    complying_cycle: tuple[str, ...]
    complying_payoff: Vector
    violations: list[str]
    product_nodes: int


def model_check_strategy(
    eg: EpistemicGame, policy, p: Vector, node_cap: int = 1_000_000
) -> ModelCheckReport:
    """Drive `policy` against every antagonist choice and verify the payoff
    contract: complying outcome exactly p, every deviated recurring behavior
    at or below p for each surviving suspect."""
    states = eg.eve_states
    index: dict = {}
    nodes: list = []
    succ: list[list[int]] = []

    def intern(eve_id: int, mem) -> int:
        key = (eve_id, mem)
        i = index.get(key)
        if i is None:
            if len(nodes) >= node_cap:
                raise StateCapExceeded(
                    f"verification product exceeded {node_cap} nodes"
                )
            i = len(nodes)
            index[key] = i
            nodes.append(key)
            succ.append([])
            queue.append(key)
        return i

    queue: deque = deque()
    root = intern(eg.init, policy.initial())
    while queue:
        eve_id, mem = queue.popleft()
        nid = index[(eve_id, mem)]
        action = policy.action(eve_id, mem)
        aid = eg.adam_for_action(eve_id, action)
        for _t, sid in eg.adam_nodes[aid].succ:
            mem2 = policy.advance(mem, eve_id, action, sid)
            succ[nid].append(intern(sid, mem2))

    violations: list[str] = []

    # The unique complying outcome.
    walk: list[int] = []
    pos: dict[int, int] = {}
    cur = root
    while cur not in pos:
        pos[cur] = len(walk)
        walk.append(cur)
        eve_id, mem = nodes[cur]
        action = policy.action(eve_id, mem)
        node = eg.adam_nodes[eg.adam_for_action(eve_id, action)]
        if node.comply is None:
            raise StrategyUndefined("complying outcome left the complying region")
        mem2 = policy.advance(mem, eve_id, action, node.comply)
        cur = index[(node.comply, mem2)]
    start = pos[cur]
    comply_prefix = tuple(states[nodes[i][0]].vertex for i in walk[:start])
    comply_cycle = tuple(states[nodes[i][0]].vertex for i in walk[start:])
    comply_payoff = eg.game.payoff.value(frozenset(comply_cycle))
    if comply_payoff != tuple(p):
        violations.append(
            f"complying outcome pays {tuple(str(q) for q in comply_payoff)}, "
            f"expected {tuple(str(q) for q in p)}"
        )

    # Deviated product region: exact recurring-color-set analysis.
    atoms = eg.game.payoff.atoms()
    deviated = [i for i in range(len(nodes)) if states[nodes[i][0]].deviated]
    dev_ids = {i: n for n, i in enumerate(deviated)}
    sub_adj = [
        [dev_ids[t] for t in succ[i] if t in dev_ids] for i in deviated
    ]
    for comp in strongly_connected_components(len(deviated), sub_adj):
        comp_nodes = [deviated[i] for i in comp]
        has_edge = any(
            dev_ids[t] in set(comp)
            for i in comp_nodes
            for t in succ[i]
            if t in dev_ids
        )
        if not has_edge:
            continue
        dev = states[nodes[comp_nodes[0]][0]].deviators()
        dev_idx = [eg.game.player_index[d] for d in dev]

        def color(i: int):
            v = states[nodes[i][0]].vertex
            return v if v in atoms else None

        comp_set = set(comp_nodes)
        colors = sorted({color(i) for i in comp_nodes}, key=lambda c: (c is None, c))
        for mask in range(1, 1 << len(colors)):
            cc = frozenset(c for k, c in enumerate(colors) if mask >> k & 1)
            restricted = [i for i in comp_nodes if color(i) in cc]
            if not restricted:
                continue
            rid = {i: n for n, i in enumerate(restricted)}
            radj = [
                [rid[t] for t in succ[i] if t in rid and t in comp_set]
                for i in restricted
            ]
            realizable = False
            for sub in strongly_connected_components(len(restricted), radj):
                sub_nodes = [restricted[i] for i in sub]
                sub_set = set(sub)
                sub_edge = any(
                    rid[t] in sub_set
                    for i in sub_nodes
                    for t in succ[i]
                    if t in rid and t in comp_set
                )
                if not sub_edge:
                    continue
                if {color(i) for i in sub_nodes} == set(cc):
                    realizable = True
                    break
            if not realizable:
                continue
            verts = frozenset(c for c in cc if c is not None)
            vec = eg.game.payoff.value(verts)
            bad = [
                dev[k] for k, i in enumerate(dev_idx) if vec[i] > p[i]
            ]
            if bad:
                violations.append(
                    "recurring vertices "
                    + "{" + ",".join(sorted(verts)) + "}"
                    + f" with suspects {{{','.join(dev)}}} pay "
                    + f"({','.join(str(q) for q in vec)})"
                    + f" exceeding the bound for {{{','.join(bad)}}}"
                )

    return ModelCheckReport(
        ok=not violations,
        complying_prefix=comply_prefix,
        complying_cycle=comply_cycle,
        complying_payoff=comply_payoff,
        violations=violations,
        product_nodes=len(nodes),
    )
