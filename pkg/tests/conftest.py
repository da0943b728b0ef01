"""Shared fixtures: the bundled five-player example under its three
communication graphs, plus a reusable suite of random small instances."""
from __future__ import annotations

import random
import sys
from fractions import Fraction
from itertools import product

import pytest

from equisynth import asset_path
from equisynth.epistemic import build_reachable
from equisynth.errors import StateCapExceeded
from equisynth.game import (
    And,
    CommGraph,
    ConcurrentGame,
    InfAtom,
    Not,
    PayoffRule,
    PayoffSpec,
)
from equisynth.parsing import parse_comm_graph, parse_game


@pytest.fixture(scope="session")
def game5() -> ConcurrentGame:
    return parse_game(asset_path("five_player_game.json"))


def _graph(name: str, game: ConcurrentGame) -> CommGraph:
    return parse_comm_graph(asset_path(name), game.players)


@pytest.fixture(scope="session")
def g1(game5):
    return _graph("comm_g1.json", game5)


@pytest.fixture(scope="session")
def g2(game5):
    return _graph("comm_g2.json", game5)


@pytest.fixture(scope="session")
def g3(game5):
    return _graph("comm_g3.json", game5)


@pytest.fixture(scope="session")
def eg1(game5, g1):
    return build_reachable(game5, g1)


@pytest.fixture(scope="session")
def eg2(game5, g2):
    return build_reachable(game5, g2)


@pytest.fixture(scope="session")
def eg3(game5, g3):
    return build_reachable(game5, g3)


# ---------------------------------------------------------------------------
# Random instance generation (small games, arbitrary comm graphs).


def random_comm(rng: random.Random, players) -> CommGraph:
    pairs = [(a, b) for a in players for b in players if a != b]
    edges = frozenset(p for p in pairs if rng.random() < 0.4)
    return CommGraph(tuple(players), edges)


def random_game(rng: random.Random) -> ConcurrentGame:
    nv = rng.randint(1, 5)
    np_ = rng.randint(1, 4)
    na = rng.randint(1, 3)
    vertices = tuple(f"q{i}" for i in range(nv))
    players = tuple(str(i) for i in range(np_))
    actions = tuple("abc"[:na])
    allow = {}
    tab = {}
    for v in vertices:
        allow[v] = {
            p: tuple(sorted(rng.sample(actions, rng.randint(1, na))))
            for p in players
        }
        tab[v] = {
            m: rng.choice(vertices)
            for m in product(*(allow[v][p] for p in players))
        }
    rules = []
    for _ in range(rng.randint(0, 3)):
        cond = InfAtom(rng.choice(vertices))
        if rng.random() < 0.4 and nv > 1:
            cond = And(cond, InfAtom(rng.choice(vertices)))
        if rng.random() < 0.3:
            cond = Not(cond)
        vec = tuple(Fraction(rng.randint(0, 3)) for _ in players)
        rules.append(PayoffRule(cond, vec))
    default = tuple(Fraction(rng.randint(0, 3)) for _ in players)
    game = ConcurrentGame(
        vertices=vertices,
        init_vertex=vertices[0],
        players=players,
        actions=actions,
        allow=allow,
        tab=tab,
        payoff=PayoffSpec(tuple(rules), default),
    )
    game.validate()
    return game


@pytest.fixture(scope="session")
def random_instances():
    """At least 100 built random instances (game, graph, epistemic game).

    The literal knowledge oracle runs during each build, so constructing
    these already cross-checks the derived sets on every reachable state.
    """
    rng = random.Random(20260814)
    out = []
    while len(out) < 100:
        game = random_game(rng)
        graph = random_comm(rng, game.players)
        try:
            eg = build_reachable(game, graph, state_cap=50_000)
        except StateCapExceeded:
            continue
        out.append((game, graph, eg))
    return out


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the acceptance criterion verdicts after the run."""
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)
