"""Reference solvers: exhaustive search for tiny instances and a random baseline."""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .graph import ValidPairGraph
from .model import EPS, AssignmentInstance, MSSCError

DEFAULT_LIMIT = 10 ** 7


class InstanceTooLarge(MSSCError, ValueError):
    pass


@dataclass
class OracleResult:
    best_assignment: AssignmentInstance
    best_score: float
    assignments_enumerated: int


def solve_exact(graph: ValidPairGraph, limit: int = DEFAULT_LIMIT) -> OracleResult:
    """Best assignment by depth-first enumeration of worker -> task choices.

    Workers are visited in instance order, each either idle or sent to one of
    its valid tasks (idle first, then tasks in instance order).  Branches
    that overrun a budget or cannot beat the incumbent are cut.  Among equally
    scoring assignments (within 1e-9) the first one in that order wins.

    Raises :class:`InstanceTooLarge` if ``(m + 1) ** n`` exceeds ``limit``.
    """
    n, m = graph.n, graph.m
    if n and (m + 1) ** n > limit:
        raise InstanceTooLarge(f"(m+1)^n = {m + 1}^{n} exceeds limit {limit}")
    wbits, tbits, budget = graph.wbits, graph.tbits, graph.tbudget
    options = [[] for _ in range(n)]
    for wi, j, c in zip(graph.w.tolist(), graph.t.tolist(), graph.cost.tolist()):
        options[wi].append((j, c))
    # skills still obtainable for task j from workers wi.. onward
    reach = [[0] * m for _ in range(n + 1)]
    for wi in range(n - 1, -1, -1):
        row = list(reach[wi + 1])
        for j, _ in options[wi]:
            row[j] |= wbits[wi] & tbits[j]
        reach[wi] = row

    covered = [0] * m
    spent = [0.0] * m
    choice = [-1] * n
    best = {"score": 0.0, "choice": list(choice)}
    count = 0

    def bound(wi: int) -> float:
        total = 0.0
        r = reach[wi]
        for j in range(m):
            if covered[j] | r[j] == tbits[j]:
                total += budget[j] - spent[j]
        return total

    def dfs(wi: int) -> None:
        nonlocal count
        if wi == n:
            count += 1
            s = sum(budget[j] - spent[j] for j in range(m) if covered[j] == tbits[j])
            if s > best["score"] + EPS:
                best["score"], best["choice"] = s, list(choice)
            return
        if bound(wi) <= best["score"] + EPS:
            return
        dfs(wi + 1)
        for j, c in options[wi]:
            if spent[j] + c > budget[j] + EPS:
                continue
            old = covered[j]
            covered[j] = old | (wbits[wi] & tbits[j])
            spent[j] += c
            choice[wi] = j
            dfs(wi + 1)
            choice[wi] = -1
            spent[j] -= c
            covered[j] = old

    dfs(0)
    a = AssignmentInstance(graph.instance)
    cost = graph.cost_of
    for wi, j in enumerate(best["choice"]):
        if j >= 0:
            a.assign(graph.wids[wi], graph.tids[j], cost[(wi, j)])
    return OracleResult(a, a.score(), count)


_PROBES = 8  # rejection-sampling attempts before a task's pool is filtered


class _RandomRuns:
    """Shared read-only arrays for repeated random runs on one graph."""

    def __init__(self, graph: ValidPairGraph):
        self.graph = graph
        self.ew = graph.w.tolist()
        self.ec = graph.cost.tolist()
        self.cost = graph.cost
        self.edge_ids = np.arange(len(self.ec))
        self.ptr = graph.task_ptr.tolist()
        by_worker = np.argsort(graph.w, kind="stable")
        bounds = np.searchsorted(graph.w[by_worker], np.arange(graph.n + 1)).tolist()
        self.worker_edges = [by_worker[bounds[i]:bounds[i + 1]] for i in range(graph.n)]

    def run(self, rng: random.Random):
        graph = self.graph
        wbits, tbits, budget = graph.wbits, graph.tbits, graph.tbudget
        ew, ec, ptr = self.ew, self.ec, self.ptr
        m, n = graph.m, graph.n
        alive = [j for j in range(m) if ptr[j + 1] > ptr[j]]
        pools: list = [None] * m
        covered = [0] * m
        spent = [0.0] * m
        live_cost = self.cost.copy()  # inf once the edge's worker is taken
        taken = bytearray(n)
        free = n
        pairs = []
        checked = 0
        rand = rng.random
        while alive and free:
            k = int(rand() * len(alive))
            j = alive[k]
            pool = pools[j]
            if pool is None:
                pool = pools[j] = range(ptr[j], ptr[j + 1])
            room = budget[j] - spent[j] + EPS
            pick = -1
            size = len(pool)
            # probes rarely hit once most workers are gone
            if 4 * free >= n:
                for _ in range(_PROBES):
                    e = pool[int(rand() * size)]
                    checked += 1
                    if not taken[ew[e]] and ec[e] <= room:
                        pick = e
                        break
            if pick < 0:
                # taken workers and overpriced ones never become eligible
                # again, so the filtered pool can replace the old one
                checked += size
                if isinstance(pool, range):
                    sl = slice(pool.start, pool.stop)
                    pool = self.edge_ids[sl][live_cost[sl] <= room]
                else:
                    pool = pool[live_cost[pool] <= room]
                pools[j] = pool
                if len(pool):
                    pick = pool.item(int(rand() * len(pool)))
            if pick >= 0:
                wi = ew[pick]
                live_cost[self.worker_edges[wi]] = np.inf
                taken[wi] = 1
                free -= 1
                covered[j] |= wbits[wi] & tbits[j]
                spent[j] += ec[pick]
                pairs.append(pick)
                if covered[j] != tbits[j]:
                    continue
            alive[k] = alive[-1]
            alive.pop()
        score = sum(budget[j] - spent[j] for j in range(m) if covered[j] and covered[j] == tbits[j])
        return score, pairs, checked


def solve_random(graph: ValidPairGraph, runs: int = 10, seed: int | None = 0) -> AssignmentInstance:
    """Best of ``runs`` random assignments.

    A run repeatedly picks a random open task, then a random unassigned
    worker that is valid for it and fits its remaining budget.  The worker
    need not bring a missing skill.  A task closes once covered or once no
    such worker is left.  Runs draw from one seeded stream, so the result is deterministic
    and adding runs never lowers the score.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    rng = random.Random(seed)
    runner = _RandomRuns(graph)
    best_score, best_pairs, scores, checked = None, [], [], 0
    for _ in range(runs):
        s, pairs, n_checked = runner.run(rng)
        checked += n_checked
        scores.append(s)
        if best_score is None or s > best_score + EPS:
            best_score, best_pairs = s, pairs
    a = AssignmentInstance(graph.instance)
    ew, et, ec = runner.ew, graph.t.tolist(), runner.ec
    for e in best_pairs:
        a.assign(graph.wids[ew[e]], graph.tids[et[e]], ec[e])
    a.counters = {"runs": runs, "pairs_evaluated": checked}
    a.run_scores = scores
    return a
