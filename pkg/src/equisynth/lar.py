"""Muller-to-parity reduction through latest appearance records.

The record is a permutation of the color alphabet, most recently seen color
first.  Reading color c moves it to the front; the *hit* is the 1-based
position c came from.  Along any run, the largest hit occurring infinitely
often equals the number of colors seen infinitely often, and at those
moments the record prefix of that length is exactly the set of recurring
colors.  Assigning priority 2h to an accepted prefix set and 2h+1 to a
rejected one therefore turns any Muller condition into a max-parity one.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

Record = tuple[int, ...]  # permutation of color indices, most recent first


@dataclass(frozen=True)
class LarState:
    record: Record
    hit: int  # 0 before any color was read


def initial_record(color_count: int) -> Record:
    return tuple(range(color_count))


def lar_step(state: LarState, color: int) -> LarState:
    pos = state.record.index(color)
    record = (color,) + state.record[:pos] + state.record[pos + 1 :]
    return LarState(record, pos + 1)


def lar_priority(state: LarState, accept: Callable[[frozenset[int]], bool]) -> int:
    """Max-parity priority of a record state; even means accepted."""
    if state.hit == 0:
        return 0
    prefix = frozenset(state.record[: state.hit])
    return 2 * state.hit if accept(prefix) else 2 * state.hit + 1


def muller_accepts_lasso(prefix: Sequence[int], cycle: Sequence[int],
                         accept: Callable[[frozenset[int]], bool]) -> bool:
    """Direct evaluation: the recurring colors are exactly the cycle's."""
    if not cycle:
        raise ValueError("lasso cycle must be nonempty")
    return accept(frozenset(cycle))


def parity_accepts_lasso(prefix: Sequence[int], cycle: Sequence[int],
                         color_count: int,
                         accept: Callable[[frozenset[int]], bool]) -> bool:
    """Evaluate the same lasso through the record construction: run the
    record over the prefix, pump the cycle until the (cycle position, record)
    pair repeats, and check the parity of the highest priority on the loop."""
    if not cycle:
        raise ValueError("lasso cycle must be nonempty")
    state = LarState(initial_record(color_count), 0)
    for c in prefix:
        state = lar_step(state, c)
    seen: dict[tuple[int, LarState], int] = {}
    trace: list[LarState] = []
    pos = 0
    while (pos, state) not in seen:
        seen[(pos, state)] = len(trace)
        state = lar_step(state, cycle[pos])
        pos = (pos + 1) % len(cycle)
        trace.append(state)
    start = seen[(pos, state)]
    loop = trace[start:]
    top = max(lar_priority(s, accept) for s in loop)
    return top % 2 == 0
