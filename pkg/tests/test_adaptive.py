import math
import random
import statistics

import pytest
from hypothesis import given

from _instances import instances, single_task_instance, tiny_instance
from mssc.adaptive import Calibration, solve_adaptive
from mssc.baselines import solve_exact, solve_random
from mssc.gdc import set_cover_greedy
from mssc.generate import GeneratorConfig, generate
from mssc.grid import valid_pairs
from mssc.greedy import solve_greedy


def test_greedy_branch_is_identical_to_greedy():
    g = valid_pairs(generate(GeneratorConfig(m=80, n=80, seed=2)))
    # a tiny greedy constant makes greedy the cheaper estimate at the top
    res = solve_adaptive(g, calibration=Calibration(c_greedy=1e-9, c_gdc=1.0))
    assert res.decisions[0][2] == "greedy"
    ref = solve_greedy(g)
    assert res.trace == ref.trace and res.task_of == ref.task_of


def test_dividing_branch_is_taken_when_greedy_is_expensive():
    g = valid_pairs(generate(GeneratorConfig(m=80, n=80, seed=2)))
    res = solve_adaptive(g, calibration=Calibration(c_greedy=1e9, c_gdc=1.0))
    assert res.decisions[0][2] == "divide"
    assert res.violations() == []


def test_single_task_uses_set_cover():
    rng = random.Random(3)
    for _ in range(10):
        g = valid_pairs(single_task_instance(rng, 7))
        res = solve_adaptive(g)
        picked = {g.wids[wi] for wi, _ in set_cover_greedy(g, 0)}
        assert set(res.task_of) == picked


@given(instances(max_n=10, max_m=4))
def test_feasible_and_depth_bounded(inst):
    g = valid_pairs(inst)
    res = solve_adaptive(g, calibration=Calibration(c_greedy=1e6))
    assert res.violations() == []
    m = len(inst.tasks)
    if m:
        assert res.counters["max_depth"] <= math.ceil(math.log2(max(m, 1))) + 1


def test_small_instances_below_oracle_and_above_random_on_average():
    """Per instance the oracle bounds the score.  RANDOM takes the best of ten
    runs and on tiny instances it sometimes wins, so the lower side is checked
    on the mean."""
    rng = random.Random(11)
    ours, rand = [], []
    for i in range(150):
        g = valid_pairs(tiny_instance(rng, 8, 3))
        a = solve_adaptive(g)
        assert a.violations() == []
        assert a.score() <= solve_exact(g).best_score + 1e-9
        ours.append(a.score())
        rand.append(solve_random(g, runs=10, seed=i).score())
    assert statistics.fmean(ours) > statistics.fmean(rand)


def test_empty_task_list():
    g = valid_pairs(generate(GeneratorConfig(m=0, n=5, seed=0)))
    assert solve_adaptive(g).score() == 0
