import math
import random

import pytest
from hypothesis import given, strategies as st

from mssc.costmodel import (CostModelParams, adaptive_costs, argmin_g, base_case_cost, cost_gdc_remaining,
                            cost_greedy_estimate, estimate_best_g, gdc_cost, levels)


def direct_cost(g, m, n, deg_t, deg_w, n_s):
    """Closed-form divide-and-conquer cost, written out independently."""
    return ((m * g + m) * math.log(m, g) + (m - 1) / (g - 1) * deg_t ** 2
            + n_s * (deg_w - 1) + m * n)


def test_greedy_estimate_examples():
    assert cost_greedy_estimate(2, 2, 1, 1) == 20
    assert cost_greedy_estimate(7, 5, 0, 0, c_greedy=3.0) == 3.0 * 35


def test_gdc_cost_matches_direct_formula():
    rng = random.Random(0)
    for _ in range(50):
        m, n = rng.randint(2, 5000), rng.randint(0, 5000)
        dt, dw, ns, g = rng.uniform(0, 50), rng.uniform(1, 20), rng.randint(0, n), rng.randint(2, 64)
        assert gdc_cost(g, m, n, dt, dw, ns) == pytest.approx(direct_cost(g, m, n, dt, dw, ns))


def test_remaining_cost_expansion_for_eight_tasks():
    n, deg_t = 5, 3.0
    # leaves below 4, 2 and 1 tasks: 4 + 2 + 1 subproblems of deg_t^2 each
    expected = 8 * n + (8 * 2 + 8) * 1 + (4 + 2 + 1) * deg_t ** 2
    assert cost_gdc_remaining(1, 2, 8, n, deg_t, 4.0, 0) == pytest.approx(expected)


def test_remaining_cost_degenerate_cases():
    # one task: decomposition, one base case and the merge term only
    assert cost_gdc_remaining(1, 2, 1, 10, 2.0, 3.0, 4) == pytest.approx(10 + 3 + 4.0 + 4 * 2.0)
    # no conflicting workers: deg_w has no effect
    assert cost_gdc_remaining(1, 3, 50, 40, 5.0, 2.0, 0) == cost_gdc_remaining(1, 3, 50, 40, 5.0, 9.0, 0)
    with pytest.raises(ValueError):
        cost_gdc_remaining(0, 2, 8, 1, 1.0, 1.0, 0)


def test_levels_and_base_case():
    assert [levels(m, 2) for m in (1, 2, 3, 8, 9)] == [0, 1, 2, 3, 4]
    assert base_case_cost(1, 3, 2.0) == 4.0
    assert base_case_cost(9, 3, 2.0) == 9 * 4.0


def test_tiny_task_counts():
    p = CostModelParams(3.0, 2.0, 1)
    assert estimate_best_g(p, 2) == 2
    assert estimate_best_g(p, 1) == 1 and estimate_best_g(p, 0) == 1


def test_edgeless_graph_uses_first_term_only():
    p = CostModelParams(0.0, 0.0, 0)
    m = 100
    first = next(g for g in range(2, 65)
                 if m * math.log(m) * (g * math.log(g) - g - 1) / (g * math.log(2 * g)) >= 0)
    assert estimate_best_g(p, m) == first == 4


def test_thousand_tasks_degree_ten():
    p = CostModelParams(10.0, 0.0, 0)
    brute = min(range(2, 65), key=lambda g: (direct_cost(g, 1000, 0, 10.0, 0.0, 0), g))
    assert brute == argmin_g(p, 1000) == 9
    assert estimate_best_g(p, 1000) == brute
    # the ln(2g) shortcut derivative crosses zero one step early
    assert estimate_best_g(p, 1000, ln2g=True) == 8


@given(st.integers(64, 20000), st.integers(0, 20000), st.floats(0, 200), st.floats(1, 200), st.integers(0, 20000))
def test_scan_finds_the_direct_minimiser(m, n, deg_t, deg_w, n_s):
    p = CostModelParams(deg_t, deg_w, n_s)
    costs = {g: direct_cost(g, m, n, deg_t, deg_w, n_s) for g in range(2, 65)}
    g_hat = estimate_best_g(p, m, n)
    assert costs[g_hat] <= min(costs.values()) * (1 + 1e-12)


def test_scan_capped_by_task_count():
    p = CostModelParams(150.0, 1.0, 0)
    assert estimate_best_g(p, 10) == 10
    assert estimate_best_g(p, 5000) == 64
    assert estimate_best_g(p, 5000, g_max=500) == argmin_g(p, 5000, hi=500) == 128


def test_adaptive_costs_fields():
    p = CostModelParams(4.0, 3.0, 10, c_greedy=2.0, c_gdc=0.5)
    c = adaptive_costs(p, 200, 300, 1)
    assert c.g == estimate_best_g(p, 200, 300)
    assert c.cost_greedy == cost_greedy_estimate(300, 200, 4.0, 3.0, 2.0)
    assert c.use_greedy == (c.cost_greedy < c.cost_gdc)


def test_negative_statistics_rejected():
    with pytest.raises(ValueError):
        CostModelParams(-1.0, 0.0, 0)
