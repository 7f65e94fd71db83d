"""Divide-and-conquer solver: split tasks into spatial groups, solve each
group recursively, and merge the partial assignments.

A group is formed around an anchor task (the leftmost remaining task, lowest
y on ties) together with its nearest remaining neighbours.  Single-task
groups are solved by a weighted set-cover greedy.  Partial assignments are
merged one at a time; a worker claimed by both sides is replaced on the side
where the replacement costs less score.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .costmodel import CostModelParams, estimate_best_g
from .graph import ValidPairGraph
from .greedy import solve_greedy
from .model import EPS, AssignmentInstance


@dataclass
class Subproblem:
    graph: ValidPairGraph
    tasks: list[int]  # task indices into graph.instance.tasks

    def __len__(self) -> int:
        return len(self.tasks)

    @property
    def task_ids(self) -> list[int]:
        return [self.graph.tids[j] for j in self.tasks]

    @property
    def pairs(self) -> list[tuple[int, int, float]]:
        """Valid pairs of this group as (worker id, task id, cost)."""
        g = self.graph
        return [(g.wids[wi], g.tids[j], c) for j in self.tasks for wi, c in g.task_adj[j]]


def decompose(graph: ValidPairGraph, g: int, tasks: list[int] | None = None) -> list[Subproblem]:
    """Split ``tasks`` into groups of ``ceil(m / g)`` nearby tasks.

    Anchors are taken in sweep order (smallest x, then smallest y).  Each
    group is the anchor plus its nearest remaining tasks; distance ties go to
    the earlier task in sweep order.  The last group holds whatever is left,
    so fewer than ``g`` groups come back when ``ceil(m / g)`` does not divide
    ``m`` evenly enough.
    """
    tasks = list(range(graph.m)) if tasks is None else list(tasks)
    m = len(tasks)
    if g < 1:
        raise ValueError("g must be >= 1")
    if m == 0:
        return []
    size = math.ceil(m / g)
    if size >= m:
        return [Subproblem(graph, tasks)]
    xy = graph.task_xy[tasks]
    sweep = np.lexsort((np.asarray(tasks), xy[:, 1], xy[:, 0]))
    remaining = sweep  # positions into ``tasks``, kept in sweep order
    groups = []
    while len(remaining):
        if len(remaining) <= size:
            chosen = remaining
            remaining = remaining[:0]
        else:
            anchor = remaining[0]
            rest = remaining[1:]
            d = np.hypot(xy[rest, 0] - xy[anchor, 0], xy[rest, 1] - xy[anchor, 1])
            near = np.argsort(d, kind="stable")[: size - 1]
            keep = np.ones(len(rest), dtype=bool)
            keep[near] = False
            chosen = np.concatenate(([anchor], rest[np.sort(near)]))
            remaining = rest[keep]
        groups.append(Subproblem(graph, [tasks[p] for p in chosen.tolist()]))
    return groups


def set_cover_greedy(graph: ValidPairGraph, j: int, exclude=frozenset()) -> list[tuple[int, float]]:
    """Cover task ``j`` by repeatedly taking the lowest cost per new skill.

    The unrestricted greedy runs first; if its cover overshoots the budget
    the greedy is rerun over candidates that still fit the remaining budget.
    Returns (worker index, cost) pairs, or an empty list when no affordable
    cover is found.  Workers in ``exclude`` are not considered.
    """
    req = graph.tbits[j]
    budget = graph.tbudget[j]
    cands = [(wi, c, graph.wbits[wi] & req) for wi, c in graph.task_adj[j] if wi not in exclude]
    wids = graph.wids
    for budgeted in (False, True):
        need, spent, picked = req, 0.0, []
        pool = list(cands)
        while need:
            best, best_key = None, None
            for r in pool:
                new = (r[2] & need).bit_count()
                if not new or (budgeted and r[1] > budget - spent + EPS):
                    continue
                key = (r[1] / new, wids[r[0]])
                if best_key is None or key < best_key:
                    best, best_key = r, key
            if best is None:
                break
            picked.append((best[0], best[1]))
            need &= ~best[2]
            spent += best[1]
            pool.remove(best)
        if not need and spent <= budget + EPS:
            return picked
    return []


_LEAVE = object()  # worker leaves its task without a replacement


def _option(a: AssignmentInstance, other: AssignmentInstance, graph: ValidPairGraph,
            wid: int, tid: int) -> tuple[float, int | None, float]:
    """Cheapest way to take ``wid`` out of task ``tid`` in ``a``.

    Returns (score reduction, substitute worker id, substitute cost).  The
    substitute is ``_LEAVE`` when ``wid`` covers nothing unique and None when
    the task has to be given up.
    """
    if not a.is_complete(tid):
        return 0.0, _LEAVE, 0.0
    req = graph.tbits[graph.task_index[tid]]
    wb = a.workers[wid].skills.bits
    others = 0
    for u in a.members[tid]:
        if u != wid:
            others |= a.workers[u].skills.bits
    lost = wb & req & ~others
    c_w = a.cost[wid]
    if not lost:
        return -c_w, _LEAVE, 0.0
    room = a.remaining_budget(tid) + c_w + EPS
    wids, wbits = graph.wids, graph.wbits
    best = None
    for wi, c in graph.task_adj[graph.task_index[tid]]:
        u = wids[wi]
        if c > room or wbits[wi] & lost != lost or u in a.task_of or u in other.task_of:
            continue
        if best is None or (c, u) < best:
            best = (c, u)
    if best is None:
        return a.task_score(tid), None, 0.0
    return best[0] - c_w, best[1], best[0]


def _apply(a: AssignmentInstance, wid: int, tid: int, sub, c: float) -> None:
    if sub is None:
        a.release_task(tid)
        return
    a.unassign(wid)
    if sub is not _LEAVE:
        a.assign(sub, tid, c)


def reconcile_merge(acc: AssignmentInstance, part: AssignmentInstance, graph: ValidPairGraph,
                    inplace: bool = False, counters: Counter | None = None) -> AssignmentInstance:
    """Union of two assignments over disjoint task groups, made feasible.

    Workers held by both sides are visited by non-increasing cost in
    ``part``.  For each, the cheapest replacement is looked up on both sides
    among workers valid for the task and unused by either assignment; the
    side where the replacement loses less score gives the worker up.  With
    no replacement the task is given up entirely and its workers freed.
    """
    if not inplace:
        acc, part = acc.copy(), part.copy()
    shared = [w for w in part.task_of if w in acc.task_of]
    shared.sort(key=lambda w: (-part.cost[w], w))
    for wid in shared:
        if wid not in acc.task_of or wid not in part.task_of:
            continue
        t_acc, t_part = acc.task_of[wid], part.task_of[wid]
        red_acc, sub_acc, c_acc = _option(acc, part, graph, wid, t_acc)
        red_part, sub_part, c_part = _option(part, acc, graph, wid, t_part)
        if red_acc > red_part:
            _apply(part, wid, t_part, sub_part, c_part)
            side_sub = sub_part
        else:
            _apply(acc, wid, t_acc, sub_acc, c_acc)
            side_sub = sub_acc
        if counters is not None:
            counters["conflicts"] += 1
            counters["tasks_sacrificed" if side_sub is None else "substitutions"] += 1
    for wid, tid in part.task_of.items():
        acc.assign(wid, tid, part.cost[wid])
    return acc


class _DivideAndConquer:
    def __init__(self, graph: ValidPairGraph, g: int):
        self.graph = graph
        self.g = g
        self.counters: Counter = Counter()

    def leaf(self, j: int) -> AssignmentInstance:
        graph = self.graph
        a = AssignmentInstance(graph.instance)
        picked = set_cover_greedy(graph, j)
        self.counters["pairs_evaluated"] += len(graph.task_adj[j])
        for wi, c in picked:
            a.assign(graph.wids[wi], graph.tids[j], c)
        return a

    def solve(self, tasks: list[int], depth: int = 1) -> AssignmentInstance:
        self.counters["max_depth"] = max(self.counters["max_depth"], depth)
        if len(tasks) == 1:
            return self.leaf(tasks[0])
        groups = decompose(self.graph, self.g, tasks)
        if len(groups) == 1:
            res = solve_greedy(self.graph, tasks)
            self.counters.update({"pairs_evaluated": res.counters.get("pairs_evaluated", 0)})
            return res
        acc = None
        for sub in groups:
            part = self.solve(sub.tasks, depth + 1)
            acc = part if acc is None else reconcile_merge(acc, part, self.graph, True, self.counters)
        return acc


def solve_gdc(graph: ValidPairGraph, tasks: list[int] | None = None, *,
              g: int | None = None, params: CostModelParams | None = None) -> AssignmentInstance:
    """Divide-and-conquer solver with group count ``g`` (estimated if omitted).

    The same ``g`` is used at every level of the recursion.  The result
    carries ``counters`` (pairs evaluated, merge conflicts, substitutions,
    sacrificed tasks, recursion depth) and the ``g`` that was used.
    """
    tasks = list(range(graph.m)) if tasks is None else list(tasks)
    if not tasks:
        res = AssignmentInstance(graph.instance)
        res.counters, res.g = {}, 1
        return res
    if g is None:
        params = params or CostModelParams.from_graph(graph, tasks)
        g = max(2, estimate_best_g(params, len(tasks), graph.n))
    solver = _DivideAndConquer(graph, g)
    res = solver.solve(tasks)
    res.counters = dict(solver.counters)
    res.g = g
    return res
