import itertools
import math
import random

import pytest
from hypothesis import given, strategies as st

from _instances import instances, single_task_instance, tiny_instance
from mssc.baselines import solve_exact
from mssc.gdc import decompose, reconcile_merge, set_cover_greedy, solve_gdc
from mssc.generate import GeneratorConfig, generate
from mssc.grid import valid_pairs
from mssc.model import AssignmentInstance, Instance, Task, Worker
from mssc.skills import SkillSet

S = SkillSet.of


def line_of_tasks(xs, worker=None) -> Instance:
    ws = [worker] if worker else [Worker(0, (0.5, 0.5), 1.0, 1.0, 1.0, S((0,)))]
    return Instance(ws, [Task(j, (x, 0.5), 1.0, 10.0, S((0,))) for j, x in enumerate(xs)])


def test_decompose_single_group():
    g = valid_pairs(line_of_tasks([0.4, 0.1, 0.3]))
    (sub,) = decompose(g, 1)
    assert sorted(sub.tasks) == [0, 1, 2]


def test_decompose_singletons_in_sweep_order():
    g = valid_pairs(line_of_tasks([0.4, 0.1, 0.3, 0.2]))
    subs = decompose(g, 4)
    assert [s.task_ids for s in subs] == [[1], [3], [2], [0]]


def test_decompose_collinear_pairs():
    xs = [0.5, 0.1, 0.6, 0.3, 0.2, 0.4]
    g = valid_pairs(line_of_tasks(xs))
    groups = [sorted(xs[t] for t in s.task_ids) for s in decompose(g, 3)]
    assert groups == [[0.1, 0.2], [0.3, 0.4], [0.5, 0.6]]


@given(st.lists(st.tuples(st.floats(0, 1), st.floats(0, 1)), min_size=1, max_size=30), st.integers(1, 12))
def test_decompose_partitions_tasks(locs, g_count):
    inst = Instance([], [Task(j, p, 1.0, 1.0, S((0,))) for j, p in enumerate(locs)])
    graph = valid_pairs(inst)
    subs = decompose(graph, g_count)
    flat = [t for s in subs for t in s.tasks]
    assert sorted(flat) == list(range(len(locs)))
    size = math.ceil(len(locs) / g_count)
    assert all(len(s) == size for s in subs[:-1])
    assert 1 <= len(subs[-1]) <= size


def _leaf(graph, j):
    a = AssignmentInstance(graph.instance)
    for wi, c in set_cover_greedy(graph, j):
        a.assign(graph.wids[wi], graph.tids[j], c)
    return a


def test_merge_without_conflicts_is_union():
    inst = generate(GeneratorConfig(m=20, n=80, seed=9))
    g = valid_pairs(inst)
    a, b = _leaf(g, 0), _leaf(g, 1)
    if set(a.task_of) & set(b.task_of):
        pytest.skip("generated leaves share a worker")
    merged = reconcile_merge(a, b, g)
    assert merged.task_of == {**a.task_of, **b.task_of}
    assert merged.score() == pytest.approx(a.score() + b.score())


def test_merge_keeps_worker_where_replacement_is_costlier():
    # w0 serves both tasks; only the part side has a replacement (w1)
    ws = [Worker(0, (0.1, 0.0), 1.0, 1.0, 10.0, S((0,))),
          Worker(1, (0.25, 0.0), 1.0, 0.1, 10.0, S((0,)))]
    ts = [Task(0, (0.0, 0.0), 1.0, 10.0, S((0,))), Task(1, (0.2, 0.0), 1.0, 10.0, S((0,)))]
    g = valid_pairs(Instance(ws, ts))
    acc, part = AssignmentInstance(g.instance), AssignmentInstance(g.instance)
    acc.assign(0, 0, 1.0)
    part.assign(0, 1, 1.0)
    merged = reconcile_merge(acc, part, g)
    assert merged.task_of == {0: 0, 1: 1}
    assert merged.score() == pytest.approx(9.0 + 9.5)


def _brute_resolutions(acc, part, graph, wid):
    """Scores of every way to settle one shared worker."""
    scores = []
    for loser, keeper in ((acc, part), (part, acc)):
        tid = loser.task_of[wid]
        j = graph.task_index[tid]
        subs = [None] + [(graph.wids[wi], c) for wi, c in graph.task_adj[j]]
        for sub in subs:
            a = loser.copy()
            a.unassign(wid)
            if sub is not None:
                u, c = sub
                if u in a.task_of or u in keeper.task_of or not a.can_assign(u, tid, c):
                    continue
                a.assign(u, tid, c)
            scores.append(a.score() + keeper.score())
    return scores


def test_merge_matches_brute_force_on_single_conflicts():
    rng = random.Random(1)
    seen = 0
    while seen < 100:
        inst = tiny_instance(rng, rng.randint(3, 5), 2)
        g = valid_pairs(inst)
        a, b = _leaf(g, 0), _leaf(g, 1)
        shared = set(a.task_of) & set(b.task_of)
        if len(shared) != 1:
            continue
        seen += 1
        merged = reconcile_merge(a, b, g)
        assert merged.violations() == []
        assert merged.score() == pytest.approx(max(_brute_resolutions(a, b, g, shared.pop())), abs=1e-9)


@given(instances(max_n=10, max_m=4), st.integers(2, 4))
def test_gdc_feasible(inst, g_count):
    res = solve_gdc(valid_pairs(inst), g=g_count)
    assert res.violations() == []


def test_single_task_equals_set_cover():
    rng = random.Random(4)
    for _ in range(20):
        g = valid_pairs(single_task_instance(rng, 6))
        res = solve_gdc(g)
        assert res.task_of == _leaf(g, 0).task_of


def test_disjoint_neighbourhoods_sum_up():
    ws, ts = [], []
    for j in range(4):
        x = 0.1 + 0.25 * j
        ts.append(Task(j, (x, 0.5), 1.0, 10.0, S((0, 1))))
        ws.append(Worker(2 * j, (x + 0.01, 0.5), 1.0, 0.05, 10.0, S((0,))))
        ws.append(Worker(2 * j + 1, (x - 0.01, 0.5), 1.0, 0.05, 20.0, S((1,))))
    g = valid_pairs(Instance(ws, ts))
    res = solve_gdc(g, g=2)
    assert res.score() == pytest.approx(sum(_leaf(g, j).score() for j in range(4)))
    assert res.score() == pytest.approx(4 * (10 - 0.1 - 0.2))


def test_small_random_instance_below_oracle():
    rng = random.Random(8)
    for _ in range(30):
        g = valid_pairs(tiny_instance(rng, 8, 3))
        res = solve_gdc(g)
        assert res.violations() == []
        assert res.score() <= solve_exact(g).best_score + 1e-9


def _optimal_cover_cost(graph, j):
    req = graph.tbits[j]
    cands = [(graph.wbits[wi] & req, c) for wi, c in graph.task_adj[j]]
    best = math.inf
    for r in range(1, len(cands) + 1):
        for combo in itertools.combinations(cands, r):
            bits = 0
            for b, _ in combo:
                bits |= b
            if bits == req:
                best = min(best, sum(c for _, c in combo))
    return best


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 9))
def test_set_cover_within_harmonic_bound(seed, n):
    g = valid_pairs(single_task_instance(random.Random(seed), n))
    opt = _optimal_cover_cost(g, 0)
    picked = set_cover_greedy(g, 0)
    if opt == math.inf:
        assert picked == []
        return
    k = g.tbits[0].bit_count()
    cost = sum(c for _, c in picked)
    assert cost <= sum(1 / i for i in range(1, k + 1)) * opt + 1e-9
