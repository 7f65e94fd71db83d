"""Adaptive solver: keep dividing only while the cost model says it pays off.

At every recursion level the remaining subproblem is measured (task and
worker degrees, conflicting workers) and two estimates are compared: the
operations greedy would need on it, and the operations divide-and-conquer
still needs from this level down.  Greedy takes over as soon as it is
cheaper.  Both estimates are scaled by per-machine constants that
:func:`mssc.bench.calibrate` can fit; with the default constants of 1.0
the comparison is in raw operation counts.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .costmodel import CostModelParams, adaptive_costs
from .gdc import decompose, reconcile_merge, set_cover_greedy
from .graph import ValidPairGraph
from .greedy import solve_greedy
from .model import AssignmentInstance


@dataclass(frozen=True)
class Calibration:
    c_greedy: float = 1.0
    c_gdc: float = 1.0


class _Adaptive:
    def __init__(self, graph: ValidPairGraph, calibration: Calibration):
        self.graph = graph
        self.cal = calibration
        self.counters: Counter = Counter()
        self.decisions: list[tuple[int, int, str]] = []  # (level, tasks, branch)

    def solve(self, tasks: list[int], k: int) -> AssignmentInstance:
        graph = self.graph
        self.counters["max_depth"] = max(self.counters["max_depth"], k)
        if len(tasks) == 1:
            self.decisions.append((k, 1, "set_cover"))
            a = AssignmentInstance(graph.instance)
            j = tasks[0]
            for wi, c in set_cover_greedy(graph, j):
                a.assign(graph.wids[wi], graph.tids[j], c)
            self.counters["pairs_evaluated"] += len(graph.task_adj[j])
            return a
        deg_t, deg_w, n_s, n_active = graph.stats(tasks)
        params = CostModelParams(deg_t, deg_w, n_s, self.cal.c_greedy, self.cal.c_gdc)
        costs = adaptive_costs(params, len(tasks), n_active, k)
        groups = None if costs.use_greedy else decompose(graph, costs.g, tasks)
        if groups is None or len(groups) == 1:
            self.decisions.append((k, len(tasks), "greedy"))
            res = solve_greedy(graph, tasks)
            self.counters["pairs_evaluated"] += res.counters.get("pairs_evaluated", 0)
            return res
        self.decisions.append((k, len(tasks), "divide"))
        acc = None
        for sub in groups:
            part = self.solve(sub.tasks, k + 1)
            acc = part if acc is None else reconcile_merge(acc, part, graph, True, self.counters)
        return acc


def solve_adaptive(graph: ValidPairGraph, tasks: list[int] | None = None, *, level: int = 1,
                   calibration: Calibration | None = None) -> AssignmentInstance:
    """Divide while the divide-and-conquer estimate is cheaper, else run greedy.

    When the greedy branch is taken at the top level the result is exactly
    :func:`solve_greedy` on the same tasks.  The result carries ``counters``
    and ``decisions`` (level, subproblem size, branch taken) for inspection.
    """
    tasks = list(range(graph.m)) if tasks is None else list(tasks)
    solver = _Adaptive(graph, calibration or Calibration())
    res = solver.solve(tasks, level) if tasks else AssignmentInstance(graph.instance)
    res.counters = dict(solver.counters)
    res.decisions = solver.decisions
    return res
