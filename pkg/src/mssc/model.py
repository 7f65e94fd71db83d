"""Workers, tasks, feasibility predicates and score arithmetic."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .skills import SkillSet

EPS = 1e-9

Point = tuple[float, float]


class MSSCError(Exception):
    """Base class for errors raised by this package."""


class BudgetViolation(MSSCError, ValueError):
    pass


class InfeasibleAssignment(MSSCError, ValueError):
    pass


@dataclass(frozen=True)
class Worker:
    id: int
    loc: Point
    velocity: float
    max_dist: float
    unit_cost: float
    skills: SkillSet

    def __post_init__(self):
        if not self.velocity > 0:
            raise ValueError(f"worker {self.id}: velocity must be > 0")
        if self.max_dist < 0:
            raise ValueError(f"worker {self.id}: max_dist must be >= 0")
        if self.unit_cost < 0:
            raise ValueError(f"worker {self.id}: unit_cost must be >= 0")
        if not self.skills:
            raise ValueError(f"worker {self.id}: empty skill set")


@dataclass(frozen=True)
class Task:
    id: int
    loc: Point
    deadline: float
    budget: float
    required: SkillSet

    def __post_init__(self):
        if not self.deadline > 0:
            raise ValueError(f"task {self.id}: deadline must be > 0")
        if self.budget < 0:
            raise ValueError(f"task {self.id}: budget must be >= 0")
        if not self.required:
            raise ValueError(f"task {self.id}: empty required skill set")


@dataclass
class Instance:
    workers: list[Worker]
    tasks: list[Task]
    timestamp: int = 0
    skill_names: list[str] | None = None

    def __post_init__(self):
        for kind, items in (("worker", self.workers), ("task", self.tasks)):
            ids = [x.id for x in items]
            if len(set(ids)) != len(ids):
                raise ValueError(f"duplicate {kind} ids")

    @property
    def n(self) -> int:
        return len(self.workers)

    @property
    def m(self) -> int:
        return len(self.tasks)

    @cached_property
    def worker_by_id(self) -> dict[int, Worker]:
        return {w.id: w for w in self.workers}

    @cached_property
    def task_by_id(self) -> dict[int, Task]:
        return {t.id: t for t in self.tasks}

    @property
    def universe(self) -> int:
        """Skill universe size K (largest skill index + 1)."""
        k = max((w.skills.width() for w in self.workers), default=0)
        return max(k, max((t.required.width() for t in self.tasks), default=0))


def dist(a: Point, b: Point) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def travel_cost(w: Worker, t: Task) -> float:
    return w.unit_cost * dist(w.loc, t.loc)


def is_valid_pair(w: Worker, t: Task, now: float = 0.0) -> bool:
    """Distance, deadline, skill and budget conditions of a worker-task pair.

    ``t.deadline`` is measured from the round start; ``now`` shifts it when a
    caller keeps absolute deadlines.
    """
    d = dist(w.loc, t.loc)
    return (
        d <= w.max_dist
        and d / w.velocity <= t.deadline - now
        and not w.skills.isdisjoint(t.required)
        and w.unit_cost * d <= t.budget
    )


def flexible_budget(t: Task, assigned_costs: Iterable[float]) -> float:
    spent = math.fsum(assigned_costs)
    if spent > t.budget + EPS:
        raise BudgetViolation(f"task {t.id}: spent {spent} exceeds budget {t.budget}")
    return t.budget - spent


def score_increase(w: Worker, t: Task, covered: SkillSet, cost: float | None = None) -> float:
    if cost is None:
        cost = travel_cost(w, t)
    new = (w.skills.bits & t.required.bits & ~covered.bits).bit_count()
    return new / len(t.required) * t.budget - cost


class AssignmentInstance:
    """A mutable set of worker -> task pairs with per-task coverage state.

    Only the solver that owns an assignment mutates it.  ``assign`` refuses
    pairs that break worker uniqueness or the task budget, so an instance
    built through it always satisfies the feasibility conditions.
    """

    def __init__(self, instance: Instance):
        self.instance = instance
        self.workers = instance.worker_by_id
        self.tasks = instance.task_by_id
        self.task_of: dict[int, int] = {}
        self.cost: dict[int, float] = {}
        self.members: dict[int, set[int]] = defaultdict(set)
        self.covered: dict[int, int] = defaultdict(int)
        self.spent: dict[int, float] = defaultdict(float)

    def copy(self) -> "AssignmentInstance":
        new = AssignmentInstance.__new__(AssignmentInstance)
        new.instance = self.instance
        new.workers = self.workers
        new.tasks = self.tasks
        new.task_of = dict(self.task_of)
        new.cost = dict(self.cost)
        new.members = defaultdict(set, {t: set(ws) for t, ws in self.members.items() if ws})
        new.covered = defaultdict(int, self.covered)
        new.spent = defaultdict(float, self.spent)
        return new

    def __len__(self) -> int:
        return len(self.task_of)

    def __contains__(self, pair: tuple[int, int]) -> bool:
        return self.task_of.get(pair[0]) == pair[1]

    @property
    def pairs(self) -> set[tuple[int, int]]:
        return set(self.task_of.items())

    def sorted_pairs(self) -> list[tuple[int, int, float]]:
        return sorted((w, t, self.cost[w]) for w, t in self.task_of.items())

    def remaining_budget(self, tid: int) -> float:
        return self.tasks[tid].budget - self.spent[tid]

    def can_assign(self, wid: int, tid: int, cost: float) -> bool:
        return wid not in self.task_of and cost <= self.remaining_budget(tid) + EPS

    def assign(self, wid: int, tid: int, cost: float | None = None) -> None:
        w, t = self.workers[wid], self.tasks[tid]
        if cost is None:
            cost = travel_cost(w, t)
        if wid in self.task_of:
            raise InfeasibleAssignment(f"worker {wid} already assigned to task {self.task_of[wid]}")
        if cost > self.remaining_budget(tid) + EPS:
            raise BudgetViolation(f"task {tid}: cost {cost} exceeds remaining budget")
        self.task_of[wid] = tid
        self.cost[wid] = cost
        self.members[tid].add(wid)
        self.covered[tid] |= w.skills.bits & t.required.bits
        self.spent[tid] += cost

    def unassign(self, wid: int) -> int:
        tid = self.task_of.pop(wid)
        self.cost.pop(wid)
        self.members[tid].discard(wid)
        self._refresh(tid)
        return tid

    def release_task(self, tid: int) -> list[int]:
        """Drop every worker of ``tid``; returns the released worker ids."""
        released = sorted(self.members.get(tid, ()))
        for wid in released:
            del self.task_of[wid]
            del self.cost[wid]
        self.members[tid] = set()
        self.covered[tid] = 0
        self.spent[tid] = 0.0
        return released

    def _refresh(self, tid: int) -> None:
        req = self.tasks[tid].required.bits
        cov = 0
        for wid in self.members[tid]:
            cov |= self.workers[wid].skills.bits & req
        self.covered[tid] = cov
        self.spent[tid] = math.fsum(self.cost[w] for w in self.members[tid])

    def is_complete(self, tid: int) -> bool:
        req = self.tasks[tid].required.bits
        return self.covered.get(tid, 0) & req == req

    @property
    def completed(self) -> set[int]:
        return {tid for tid, ws in self.members.items() if ws and self.is_complete(tid)}

    @property
    def incomplete(self) -> set[int]:
        return {tid for tid, ws in self.members.items() if ws and not self.is_complete(tid)}

    def task_score(self, tid: int) -> float:
        """Flexible budget of ``tid`` if it is completed, else 0."""
        if not self.members.get(tid) or not self.is_complete(tid):
            return 0.0
        return self.tasks[tid].budget - self.spent[tid]

    def score(self) -> float:
        return assignment_score(self)

    def violations(self, now: float = 0.0) -> list[str]:
        """Feasibility check from scratch; an empty list means feasible."""
        out = []
        seen: dict[int, int] = {}
        for wid, tid in self.task_of.items():
            if wid in seen:
                out.append(f"worker {wid} assigned twice")
            seen[wid] = tid
            w, t = self.workers[wid], self.tasks[tid]
            if not is_valid_pair(w, t, now):
                out.append(f"invalid pair ({wid}, {tid})")
            if abs(self.cost[wid] - travel_cost(w, t)) > 1e-6:
                out.append(f"stale cost for ({wid}, {tid})")
        per_task: dict[int, list[float]] = defaultdict(list)
        for wid, tid in self.task_of.items():
            per_task[tid].append(travel_cost(self.workers[wid], self.tasks[tid]))
        for tid, costs in per_task.items():
            if math.fsum(costs) > self.tasks[tid].budget + 1e-7:
                out.append(f"task {tid} over budget")
        return out


def assignment_score(a: AssignmentInstance) -> float:
    return math.fsum(a.task_score(tid) for tid in a.completed)


def build_assignment(instance: Instance, pairs: Sequence[tuple[int, int, float]]) -> AssignmentInstance:
    a = AssignmentInstance(instance)
    for wid, tid, c in pairs:
        a.assign(wid, tid, c)
    return a


__all__ = [
    "EPS",
    "AssignmentInstance",
    "BudgetViolation",
    "InfeasibleAssignment",
    "Instance",
    "MSSCError",
    "Task",
    "Worker",
    "assignment_score",
    "build_assignment",
    "dist",
    "flexible_budget",
    "is_valid_pair",
    "score_increase",
    "travel_cost",
]
