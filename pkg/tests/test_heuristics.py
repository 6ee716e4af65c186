import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from astar_knapsack.experiment import DEFAULT_EPSILONS
from astar_knapsack.heuristics import (
    FptasResult,
    TableHeuristic,
    as_epsilon,
    exact_opt,
    fptas_solve,
    fptas_value,
    fptas_workspace,
    h_epsilon,
    h_star,
    h_zero,
)
from astar_knapsack.knapsack import (
    KnapsackInstance,
    item_set,
    total_profit,
    total_weight,
)
from oracles import brute_hstar, brute_opt, instances

S = item_set
epsilons = st.sampled_from(DEFAULT_EPSILONS) | st.fractions(
    min_value=Fraction(1, 1000), max_value=Fraction(999, 1000)
).filter(lambda e: 0 < e < 1)


def test_as_epsilon_is_exact():
    assert as_epsilon(0.0016) == Fraction(16, 10000)
    assert as_epsilon("0.4096") == Fraction(4096, 10000)
    assert as_epsilon(Fraction(1, 3)) == Fraction(1, 3)


@pytest.mark.parametrize("bad", [0, 1, -0.5, 1.2, "x", Fraction(3, 2)])
def test_as_epsilon_rejects(bad):
    with pytest.raises(ValueError):
        as_epsilon(bad)


def test_fptas_rejects_bad_parameters(tiny):
    with pytest.raises(ValueError):
        fptas_solve(tiny, tiny.full, 0)
    with pytest.raises(ValueError):
        fptas_solve(tiny, tiny.full, 1)
    with pytest.raises(ValueError):
        fptas_solve(tiny, 0, 0.5)


def test_fptas_whole_set_feasible():
    inst = KnapsackInstance((5, 6, 7), (1, 1, 1), 10)
    res = fptas_solve(inst, inst.full, 0.3)
    assert res.selected == inst.full and res.value == 18


def test_fptas_scaled_example():
    inst = KnapsackInstance((100, 7), (10, 7), 16)
    ws = fptas_workspace(inst, inst.full, Fraction(1, 5))
    assert ws.K == 10 and ws.scaled == (10, 0) and not ws.exact
    res = fptas_solve(inst, inst.full, Fraction(1, 5))
    assert res.value == 100 and res.selected == S([1])
    assert exact_opt(inst, inst.full) == 100


def test_fptas_exact_mode_example(tiny):
    ws = fptas_workspace(tiny, tiny.full, Fraction(1, 10))
    # K = (1/10) * 4 / 3 = 2/15 <= 1
    assert ws.exact and ws.scaled == (2, 3, 4)
    assert fptas_solve(tiny, tiny.full, Fraction(1, 10)).value == 5


def test_fptas_skips_items_that_never_fit():
    # item 2 alone is over capacity; keeping it would inflate K to 5000 and zero out item 1
    inst = KnapsackInstance((10, 100000), (1, 50), 10)
    res = fptas_solve(inst, inst.full, Fraction(1, 2))
    assert res.value == 10


def test_fptas_dead_end_returns_empty():
    inst = KnapsackInstance((4, 5), (10, 11), 3)
    assert fptas_solve(inst, inst.full, 0.5) == FptasResult(0, 0)
    assert fptas_value(inst, inst.full, 0.5) == 0


def test_h_epsilon_examples(tiny):
    assert h_epsilon(tiny, Fraction(1, 10))(tiny.full) == Fraction(31, 9)
    assert h_epsilon(tiny, Fraction(1, 2))(tiny.full) == 0
    assert h_epsilon(tiny, 0.1)(S([1, 2])) == 0


def test_h_star_examples(tiny):
    h = h_star(tiny)
    assert h(tiny.full) == 4
    assert h(S([2, 3])) == 3
    assert h(S([1, 3])) == 2
    assert h(S([1, 2])) == 0


def test_exact_opt_examples(tiny):
    assert exact_opt(tiny, 0) == 0
    assert exact_opt(tiny, tiny.full) == 5
    inst = KnapsackInstance((100, 7), (10, 7), 16)
    assert exact_opt(inst, inst.full) == 100


def test_h_star_dead_end_is_infinite():
    inst = KnapsackInstance((4, 5, 1), (10, 11, 2), 3)
    h = h_star(inst)
    assert h(S([1, 2])) == math.inf
    assert h(S([1, 2, 3])) == 9
    assert h(S([3])) == 0


def test_zero_and_table():
    inst = KnapsackInstance((4, 5), (10, 11), 12)
    assert h_zero(inst)(3) == 0
    table = TableHeuristic(inst, {(1, 2): 7}, default=2)
    assert table(S([1, 2])) == 7
    # solutions are forced to 0 regardless of the table
    assert table(S([1])) == 0


@given(instances(max_n=8, max_value=200), epsilons, st.data())
def test_fptas_guarantee(inst, eps, data):
    x = data.draw(st.integers(1, inst.full))
    res = fptas_solve(inst, x, eps)
    opt = brute_opt(inst, x)
    assert res.selected & ~x == 0
    assert total_weight(inst, res.selected) <= inst.capacity
    assert total_profit(inst, res.selected) == res.value
    assert (1 - eps) * opt <= res.value <= opt


@given(instances(max_n=8, max_value=200), epsilons, st.data())
def test_kernel_matches_table_dp(inst, eps, data):
    x = data.draw(st.integers(1, inst.full))
    assert fptas_value(inst, x, eps) == fptas_solve(inst, x, eps).value


@given(instances(max_n=8, max_value=200), epsilons, st.data())
def test_exact_mode_agrees_with_opt(inst, eps, data):
    x = data.draw(st.integers(1, inst.full))
    ws = fptas_workspace(inst, x, eps)
    assume(ws.exact)
    assert fptas_solve(inst, x, eps).value == brute_opt(inst, x)


@given(instances(max_n=7, max_value=300), epsilons, st.data())
def test_scaled_profits_are_floor_p_over_k(inst, eps, data):
    x = data.draw(st.integers(1, inst.full))
    ws = fptas_workspace(inst, x, eps)
    if not ws.items:
        return
    fits = [i for i in range(1, inst.n + 1) if x >> (i - 1) & 1 and inst.weight(i) <= inst.capacity]
    assert list(ws.items) == fits
    P = max(inst.profit(i) for i in fits)
    K = Fraction(eps) * P / len(fits)
    assert ws.K == (K if K > 1 else 1)
    for i, s in zip(ws.items, ws.scaled):
        assert s == (math.floor(inst.profit(i) / K) if K > 1 else inst.profit(i))


@given(instances(max_n=7, max_value=300), epsilons, st.data())
def test_dp_table_is_monotone_with_valid_witnesses(inst, eps, data):
    x = data.draw(st.integers(1, inst.full))
    ws = fptas_workspace(inst, x, eps)
    none = ws.NO_SET
    assert np.all(ws.weight[1:] <= ws.weight[:-1])
    scaled = dict(zip(ws.items, ws.scaled))
    for i in range(len(ws.items) + 1):
        for q in np.flatnonzero(ws.weight[i] != none):
            wit = ws.witness(i, int(q))
            idx = [b + 1 for b in range(inst.n) if wit >> b & 1]
            assert set(idx) <= set(ws.items[:i])
            assert sum(scaled[j] for j in idx) == q
            assert total_weight(inst, wit) == ws.weight[i, q]
            assert total_profit(inst, wit) == ws.profit[i, q]


@given(instances(max_n=8, max_value=200))
def test_h_star_matches_brute_force(inst):
    h = h_star(inst)
    for x in range(1, inst.full + 1):
        assert h(x) == brute_hstar(inst, x)


@given(instances(max_n=7, max_value=200), epsilons)
def test_h_epsilon_is_admissible_and_zero_at_solutions(inst, eps):
    h = h_epsilon(inst, eps)
    for x in range(1, inst.full + 1):
        v = h(x)
        assert v >= 0
        assert v <= brute_hstar(inst, x)
        if total_weight(inst, x) <= inst.capacity:
            assert v == 0


@given(instances(max_n=7, max_value=200), epsilons)
def test_h_epsilon_definition(inst, eps):
    h = h_epsilon(inst, eps)
    fresh = h_epsilon(inst, eps)
    for x in range(1, inst.full + 1):
        if total_weight(inst, x) > inst.capacity:
            want = max(total_profit(inst, x) - Fraction(fptas_solve(inst, x, eps).value) / (1 - eps), 0)
            assert h(x) == want
        # memoised values match a cold evaluation
        assert h(x) == fresh(x)


@given(instances(max_n=10, max_value=500), st.data())
def test_exact_opt_matches_brute_force(inst, data):
    x = data.draw(st.integers(0, inst.full))
    assert exact_opt(inst, x) == brute_opt(inst, x)


def test_kernel_handles_large_profits():
    big = 2**40
    inst = KnapsackInstance((big, big + 1, 3), (5, 6, 4), 10)
    eps = Fraction(1, 3)
    assert fptas_value(inst, inst.full, eps) == fptas_solve(inst, inst.full, eps).value


def test_overflow_risk_uses_the_table_dp():
    inst = KnapsackInstance((2**59, 2**59 + 1, 3), (5, 6, 4), 10)
    eps = Fraction(1, 3)
    assert fptas_value(inst, inst.full, eps) == 2**59 + 1
