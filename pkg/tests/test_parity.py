"""Zero-sum max-parity solving against exhaustive positional enumeration."""
from __future__ import annotations

import random

from equisynth.parity import ParityGame, solve_parity

from oracles import (
    brute_force_parity_regions,
    check_positional_strategy,
    random_parity_game,
)


def test_single_even_self_loop():
    pg = ParityGame([0], [2], [[0]])
    w0, w1, s0, _ = solve_parity(pg)
    assert w0 == {0} and not w1
    assert s0 == {0: 0}


def test_single_odd_self_loop():
    pg = ParityGame([0], [1], [[0]])
    w0, w1, _, _ = solve_parity(pg)
    assert w1 == {0} and not w0


def test_dead_end_loses_for_owner():
    # Node 0 (player 0) can only move to node 1, which is stuck and owned
    # by player 1: getting stuck loses, so player 0 wins both nodes.
    pg = ParityGame([0, 1], [1, 1], [[1], []])
    w0, w1, _, _ = solve_parity(pg)
    assert w0 == {0, 1} and not w1
    pg = ParityGame([1, 0], [2, 2], [[1], []])
    w0, w1, _, _ = solve_parity(pg)
    assert w1 == {0, 1} and not w0


def test_choice_matters():
    # Player 0 at node 0 picks between an odd loop and an even loop.
    pg = ParityGame([0, 1, 1], [0, 1, 2], [[1, 2], [1], [2]])
    w0, _, s0, _ = solve_parity(pg)
    assert w0 == {0, 2}
    assert s0[0] == 2


def test_regions_partition_all_nodes():
    rng = random.Random(11)
    for _ in range(50):
        pg = random_parity_game(rng)
        w0, w1, s0, s1 = solve_parity(pg)
        assert w0 | w1 == set(range(pg.node_count()))
        assert not (w0 & w1)
        assert all(pg.owner[v] == 0 for v in s0)
        assert all(pg.owner[v] == 1 for v in s1)
        assert all(s0[v] in pg.succ[v] for v in s0)
        assert all(s1[v] in pg.succ[v] for v in s1)


def test_against_positional_enumeration():
    rng = random.Random(20260814)
    games = 0
    while games < 200:
        pg = random_parity_game(rng, max_nodes=8)
        expected0, expected1 = brute_force_parity_regions(pg)
        w0, w1, s0, _s1 = solve_parity(pg)
        assert w0 == expected0, (pg, sorted(w0), sorted(expected0))
        assert w1 == expected1
        assert check_positional_strategy(pg, w0, s0), (pg, s0)
        games += 1
