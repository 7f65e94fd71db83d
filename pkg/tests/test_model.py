import math
import random

import pytest
from hypothesis import given, strategies as st

from _instances import instances, tiny_instance
from mssc.model import (AssignmentInstance, BudgetViolation, InfeasibleAssignment, Instance, Task,
                        Worker, assignment_score, dist, flexible_budget, is_valid_pair,
                        score_increase, travel_cost)
from mssc.skills import SkillSet

S = SkillSet.of


def worker(wid=0, loc=(0.0, 0.0), v=1.0, d=1.0, c=20.0, skills=(0,)):
    return Worker(wid, loc, v, d, c, S(skills))


def task(tid=0, loc=(0.0, 0.0), e=1.0, b=10.0, req=(0,)):
    return Task(tid, loc, e, b, S(req))


@pytest.mark.parametrize("a,b,expected", [
    ((0, 0), (0, 0), 0.0),
    ((0, 0), (3, 4), 5.0),
    ((0.1, 0.2), (0.4, 0.6), 0.5),
])
def test_dist_examples(a, b, expected):
    assert dist(a, b) == pytest.approx(expected, abs=1e-12)


@given(st.tuples(*[st.floats(-10, 10)] * 6))
def test_dist_is_a_metric(xs):
    a, b, c = xs[:2], xs[2:4], xs[4:]
    assert dist(a, b) == dist(b, a)
    assert dist(a, c) <= dist(a, b) + dist(b, c) + 1e-9


def test_travel_cost_examples():
    assert travel_cost(worker(c=20.0), task(loc=(0.1, 0.0))) == pytest.approx(2.0)
    assert travel_cost(worker(c=0.0), task(loc=(0.9, 0.3))) == 0.0
    assert travel_cost(worker(c=30.0), task(loc=(0.3, 0.4))) == pytest.approx(15.0)


def test_valid_pair_examples():
    assert not is_valid_pair(worker(skills=(1,)), task(req=(2, 3)))
    assert is_valid_pair(worker(loc=(0.4, 0.4)), task(loc=(0.4, 0.4), b=0.5))
    assert not is_valid_pair(worker(d=0.1), task(loc=(0.2, 0.0), b=100.0))


def test_valid_pair_deadline_and_budget():
    w = worker(v=0.25, c=10.0)
    assert is_valid_pair(w, task(loc=(0.25, 0.0), e=1.0))        # arrives exactly at the deadline
    assert not is_valid_pair(w, task(loc=(0.25, 0.0), e=0.99))
    assert not is_valid_pair(w, task(loc=(0.25, 0.0), b=2.4))     # cost 2.5
    assert is_valid_pair(w, task(loc=(0.25, 0.0), e=0.5), now=-0.5)


def test_flexible_budget_examples():
    assert flexible_budget(task(b=10), [2, 3]) == 5
    assert flexible_budget(task(b=10), []) == 10
    assert flexible_budget(task(b=5), [5]) == 0
    with pytest.raises(BudgetViolation):
        flexible_budget(task(b=5), [3, 3])


def test_score_increase_examples():
    t = task(b=10.0, req=(0, 1, 2, 3))
    assert score_increase(worker(skills=(0, 1)), t, S(()), cost=2.0) == pytest.approx(3.0)
    assert score_increase(worker(skills=(0,)), t, S((0, 1)), cost=1.0) == pytest.approx(-1.0)
    assert score_increase(worker(skills=(0,)), task(b=7.0, req=(0,)), S(()), cost=7.0) == 0.0


def _inst(workers, tasks):
    return Instance(list(workers), list(tasks))


def test_assignment_score_examples():
    t = task(b=10.0, req=(0, 1))
    inst = _inst([worker(0, skills=(0,)), worker(1, skills=(1,))], [t])
    a = AssignmentInstance(inst)
    assert assignment_score(a) == 0
    a.assign(0, 0, 2.0)
    assert a.score() == 0            # partial cover
    a.assign(1, 0, 3.0)
    assert a.score() == pytest.approx(5.0)
    assert a.completed == {0}


def test_assign_refuses_infeasible_pairs():
    inst = _inst([worker(0), worker(1)], [task(0, b=3.0), task(1)])
    a = AssignmentInstance(inst)
    a.assign(0, 0, 2.0)
    with pytest.raises(InfeasibleAssignment):
        a.assign(0, 1, 0.0)
    with pytest.raises(BudgetViolation):
        a.assign(1, 0, 1.5)


def test_unassign_and_release_restore_state():
    inst = _inst([worker(0, skills=(0,)), worker(1, skills=(1,))], [task(0, req=(0, 1))])
    a = AssignmentInstance(inst)
    a.assign(0, 0, 1.0)
    a.assign(1, 0, 2.0)
    assert a.unassign(1) == 0
    assert a.covered[0] == S((0,)).bits and a.spent[0] == pytest.approx(1.0)
    assert a.release_task(0) == [0]
    assert len(a) == 0 and a.spent[0] == 0.0 and a.covered[0] == 0


def test_entities_reject_bad_fields():
    with pytest.raises(ValueError):
        Worker(0, (0, 0), 0.0, 1.0, 1.0, S((0,)))
    with pytest.raises(ValueError):
        Worker(0, (0, 0), 1.0, 1.0, 1.0, S(()))
    with pytest.raises(ValueError):
        Task(0, (0, 0), 0.0, 1.0, S((0,)))
    with pytest.raises(ValueError):
        Task(0, (0, 0), 1.0, -1.0, S((0,)))
    with pytest.raises(ValueError):
        Instance([worker(0), worker(0)], [])


def _random_feasible_assignment(inst, rng):
    a = AssignmentInstance(inst)
    order = [(w, t) for w in inst.workers for t in inst.tasks if is_valid_pair(w, t)]
    rng.shuffle(order)
    for w, t in order:
        c = travel_cost(w, t)
        if a.can_assign(w.id, t.id, c):
            a.assign(w.id, t.id, c)
    return a, order


@given(instances(), st.integers(0, 1000))
def test_score_equals_sum_of_increases_on_completed_tasks(inst, seed):
    a, _ = _random_feasible_assignment(inst, random.Random(seed))
    # replay per task in worker-id order and sum the increases
    total = 0.0
    for tid in a.completed:
        t = inst.task_by_id[tid]
        covered = S(())
        for wid in sorted(a.members[tid]):
            w = inst.worker_by_id[wid]
            total += score_increase(w, t, covered, a.cost[wid])
            covered = covered | (w.skills & t.required)
    assert total == pytest.approx(a.score(), abs=1e-9)
    assert a.score() >= -1e-12
    assert a.violations() == []


@given(instances(), st.integers(0, 1000))
def test_coverage_never_shrinks_when_adding_pairs(inst, seed):
    rng = random.Random(seed)
    a = AssignmentInstance(inst)
    order = [(w, t) for w in inst.workers for t in inst.tasks if is_valid_pair(w, t)]
    rng.shuffle(order)
    for w, t in order:
        c = travel_cost(w, t)
        if not a.can_assign(w.id, t.id, c):
            continue
        before = dict(a.covered)
        a.assign(w.id, t.id, c)
        for tid, bits in before.items():
            assert a.covered[tid] & bits == bits
        assert a.spent[t.id] <= t.budget + 1e-9


def test_copy_is_independent():
    inst = tiny_instance(random.Random(1), 6, 2)
    a, _ = _random_feasible_assignment(inst, random.Random(2))
    b = a.copy()
    for wid in list(b.task_of):
        b.unassign(wid)
    assert len(b) == 0 and a.violations() == []
    assert math.isclose(a.score(), assignment_score(a))
