"""Greedy assignment: commit the pair with the largest score increase, repeatedly.

Three pruning rules keep the candidate set small:

* dominated workers: ``w_a`` is dropped for task ``t`` when another candidate
  has a superset of its skills at no higher travel cost;
* high-wage workers: a pair whose cost exceeds the task's remaining budget
  can never be committed again (the remaining budget only shrinks);
* insufficient tasks: a task is dropped when the candidate with the best
  cost per newly covered skill is unaffordable, or when the affordable
  candidates together cannot cover what is still missing.

The default solver keeps one heap entry per task (its current best pair)
and re-evaluates a task only when its own state changed or one of its
candidate workers was taken.  A task's best score increase never grows, so
stale entries are upper bounds and a lazy heap reproduces the round-by-round
scan of every task exactly.  ``incremental=False`` runs that literal scan.
"""

from __future__ import annotations

import heapq
from collections import Counter, defaultdict
from dataclasses import dataclass, field

import numpy as np

from .graph import ValidPairGraph
from .model import EPS, AssignmentInstance

Candidate = tuple[int, float, int]  # (worker, travel cost, skill bits)


def _quantize(ds: float) -> int:
    # score increases closer than EPS compare equal and fall to the id tie-break
    return round(ds / EPS)


@dataclass
class TaskState:
    task: int
    covered: int = 0
    spent: float = 0.0
    assigned: list[int] = field(default_factory=list)
    cands: list[tuple[int, float]] = field(default_factory=list)
    alive: bool = True


def prune_dominated(cands: list[Candidate]) -> list[Candidate]:
    """Drop every candidate dominated by a surviving one.

    ``a`` is dominated by ``b`` when ``X_a`` is a subset of ``X_b`` and
    ``c_a >= c_b``.  Among identical (skills, cost) candidates the lowest
    worker id survives.  Survivors come back ordered by worker.
    """
    order = sorted(cands, key=lambda r: (r[1], -r[2].bit_count(), r[0]))
    kept: list[Candidate] = []
    for r in order:
        x = r[2]
        if any(x & ~k[2] == 0 for k in kept):
            continue
        kept.append(r)
    kept.sort(key=lambda r: r[0])
    return kept


def prune_high_wage(cost: float, budget: float, spent: float) -> bool:
    return cost > budget - spent + EPS


def prune_insufficient_task(need: int, remaining: float, cands: list[Candidate],
                            wids: list[int] | None = None) -> bool:
    """True when no affordable subset of ``cands`` can finish the task.

    ``cands`` are the unassigned candidates of the task; their skill bits may
    be full skill sets, only the part inside ``need`` matters.
    """
    useful = [(w, c, x & need) for w, c, x in cands if x & need]
    if not useful:
        return need != 0
    tie = (lambda w: w) if wids is None else wids.__getitem__
    best = min(useful, key=lambda r: (r[1] / r[2].bit_count(), tie(r[0])))
    if best[1] > remaining + EPS:
        return True
    cover = 0
    for _, c, new in useful:
        if c <= remaining + EPS:
            cover |= new
    return cover != need


class _Greedy:
    def __init__(self, graph: ValidPairGraph, tasks: list[int] | None, prune: bool):
        self.g = graph
        self.prune = prune
        self.tasks = list(range(graph.m)) if tasks is None else list(tasks)
        adj = graph.task_adj
        self.states = {j: TaskState(j, cands=adj[j]) for j in self.tasks}
        self.taken: set[int] = set()
        self.counters: Counter = Counter()
        self.commits: list[tuple[int, int, float, float]] = []
        self.version = dict.fromkeys(self.tasks, 0)

    def evaluate(self, j: int) -> tuple[int, int, float, int, float] | None:
        """Best (quantized increase, worker id, increase, worker, cost) for
        task ``j``; None means the task left the pool."""
        st = self.states[j]
        req = self.g.tbits[j]
        budget = self.g.tbudget[j]
        need = req & ~st.covered
        rem = budget - st.spent
        wbits, taken = self.g.wbits, self.taken
        live: list[Candidate] = []
        for wi, c in st.cands:
            if wi in taken:
                continue
            x = wbits[wi]
            if x & need:
                live.append((wi, c, x))
        if self.prune and live and prune_insufficient_task(need, rem, live, self.g.wids):
            self.counters["pruned_tasks"] += 1
            st.alive = False
            return None
        keep = []
        for r in live:
            if r[1] > rem + EPS:
                if self.prune:
                    self.counters["pruned_high_wage"] += 1
                continue
            keep.append(r)
        st.cands = [(r[0], r[1]) for r in live]
        if not keep:
            st.alive = False
            return None
        if self.prune:
            survivors = prune_dominated(keep)
            self.counters["pruned_dominated"] += len(keep) - len(survivors)
        else:
            survivors = keep
        self.counters["pairs_evaluated"] += len(survivors)
        scale = budget / req.bit_count()
        wids = self.g.wids
        best = None
        for wi, c, x in survivors:
            ds = (x & need).bit_count() * scale - c
            cand = (_quantize(ds), -wids[wi], ds, wi, c)
            if best is None or cand[:2] > best[:2]:
                best = cand
        return best

    def commit(self, ds: float, wi: int, j: int, c: float) -> None:
        st = self.states[j]
        self.taken.add(wi)
        st.assigned.append(wi)
        st.covered |= self.g.wbits[wi] & self.g.tbits[j]
        st.spent += c
        self.commits.append((wi, j, c, ds))
        self.counters["rounds"] += 1
        if st.covered == self.g.tbits[j]:
            st.alive = False

    def run_full(self) -> None:
        tids = self.g.tids
        while True:
            best = None
            for j in self.tasks:
                if not self.states[j].alive:
                    continue
                b = self.evaluate(j)
                if b is None:
                    continue
                key = (b[0], b[1], -tids[j])
                if best is None or key > best[0]:
                    best = (key, b, j)
            if best is None:
                return
            _, (_, _, ds, wi, c), j = best
            self.commit(ds, wi, j, c)

    def result(self) -> AssignmentInstance:
        return _build_result(self.g, self.commits, self.counters)


def _build_result(g: ValidPairGraph, commits, counters) -> AssignmentInstance:
    a = AssignmentInstance(g.instance)
    for wi, j, c, _ in commits:
        a.assign(g.wids[wi], g.tids[j], c)
    a.counters = dict(counters)
    a.trace = [(g.wids[wi], g.tids[j], ds) for wi, j, _, ds in commits]
    return a


class _IncrementalGreedy:
    """Same commit sequence as :class:`_Greedy`, without rescanning.

    Between two commits to a task its need and remaining budget are fixed,
    so every candidate's score increase and cost-per-skill ratio are fixed
    as well; only the set of untaken workers shrinks.  Each task therefore
    sorts its candidates once per commit and walks them with a pointer, and
    a heap holds every task's current best pair.

    The insufficient-budget rule has two parts.  The best-ratio test can
    flip either way as workers disappear, so it is rechecked whenever the
    task's best-ratio worker is taken.  The coverage test only ever turns
    true between commits, so it is checked when the task is about to
    commit; the literal scan would have dropped the task at the same point
    or earlier, with no effect on any other task.
    """

    def __init__(self, graph: ValidPairGraph, tasks: list[int] | None, prune: bool):
        g = self.g = graph
        self.prune = prune
        self.tasks = list(range(g.m)) if tasks is None else sorted(set(tasks))
        self.alive = bytearray(g.m)
        for j in self.tasks:
            self.alive[j] = 1
        self.need = list(g.tbits)
        self.rem = [b + EPS for b in g.tbudget]  # remaining budget, slack included
        self.version = [0] * g.m
        self.taken = bytearray(g.n)
        # candidate rows of all tasks live in flat parallel lists; a task
        # owns the slice [lo, hi) and a cursor into it
        self.r_negq: list[int] = []
        self.r_wid: list[int] = []
        self.r_ds: list[float] = []
        self.r_w: list[int] = []
        self.r_c: list[float] = []
        self.order: dict[int, list[int]] = {}  # j -> [cursor, hi]
        self.x_w: list[int] = []  # best-ratio order, same layout
        self.x_c: list[float] = []
        self.ratio: dict[int, list[int]] = {}
        self.head_of: dict[int, list[int]] = defaultdict(list)
        self.counters: Counter = Counter()
        self.commits: list[tuple[int, int, float, float]] = []

    def _prepare(self, j: int) -> bool:
        """Rebuild the candidate slices of ``j``; False if ``j`` is dropped."""
        g = self.g
        need, rem = self.need[j], self.rem[j]
        wbits, wids, taken = g.wbits, g.wids, self.taken
        scale = g.tbudget[j] / g.tbits_count[j]
        # with pruning on, unaffordable candidates still matter to the
        # best-ratio test, so the source is the previous best-ratio list
        if self.prune:
            lo, hi, _ = self.ratio[j]
            src_w, src_c = self.x_w[lo:hi], self.x_c[lo:hi]
        else:
            lo, hi = self.order[j]
            src_w, src_c = self.r_w[lo:hi], self.r_c[lo:hi]
        useful = []
        for wi, c in zip(src_w, src_c):
            if not taken[wi]:
                new = wbits[wi] & need
                if new:
                    useful.append((wi, c, new))
        self.counters["pairs_evaluated"] += len(useful)
        rows = []
        for wi, c, new in useful:
            if c > rem:
                self.counters["pruned_high_wage"] += self.prune
                continue
            ds = new.bit_count() * scale - c
            rows.append((-_quantize(ds), wids[wi], ds, wi, c))
        rows.sort()
        start = len(self.r_w)
        if rows:
            negq, wid, ds, w, c = zip(*rows)
            self.r_negq += negq
            self.r_wid += wid
            self.r_ds += ds
            self.r_w += w
            self.r_c += c
        self.order[j] = [start, len(self.r_w)]
        if self.prune:
            xs = sorted(useful, key=lambda r: (r[1] / r[2].bit_count(), wids[r[0]]))
            xstart = len(self.x_w)
            self.x_w += [r[0] for r in xs]
            self.x_c += [r[1] for r in xs]
            self.ratio[j] = [xstart, len(self.x_w), -1]
            if self._ratio_test(j):
                self.counters["pruned_tasks"] += bool(xs)
                self.alive[j] = 0
                return False
        return True

    def _prepare_all(self) -> None:
        """First preparation of every task, vectorised: nothing is covered
        yet and every valid pair is affordable."""
        g = self.g
        tasks = np.asarray(self.tasks, dtype=np.int64)
        ptr = g.task_ptr
        edges = (np.concatenate([np.arange(ptr[j], ptr[j + 1]) for j in self.tasks])
                 if self.tasks else np.zeros(0, dtype=np.int64))
        w, t, c = g.w[edges], g.t[edges], g.cost[edges]
        new = g.edge_skill_counts()[edges]
        ds = new * (np.asarray(g.tbudget)[t] / np.asarray(g.tbits_count)[t]) - c
        q = np.rint(ds / EPS).astype(np.int64)
        wid = np.asarray(g.wids, dtype=np.int64)[w]
        self.counters["pairs_evaluated"] += len(edges)
        lo = np.searchsorted(t, tasks).tolist()
        hi = np.searchsorted(t, tasks, side="right").tolist()
        by_ds = np.lexsort((wid, -q, t))
        self.r_negq = (-q[by_ds]).tolist()
        self.r_wid = wid[by_ds].tolist()
        self.r_ds = ds[by_ds].tolist()
        self.r_w = w[by_ds].tolist()
        self.r_c = c[by_ds].tolist()
        if self.prune:
            by_ratio = np.lexsort((wid, c / new, t))
            self.x_w = w[by_ratio].tolist()
            self.x_c = c[by_ratio].tolist()
        for j, a, b in zip(self.tasks, lo, hi):
            self.order[j] = [a, b]
            if a == b:
                self.alive[j] = 0
            elif self.prune:
                self.ratio[j] = [a, b, -1]
                if self._ratio_test(j):
                    self.counters["pruned_tasks"] += 1
                    self.alive[j] = 0

    def _ratio_test(self, j: int) -> bool:
        """Best cost-per-skill candidate unaffordable (or none left)."""
        ratio = self.ratio[j]
        p, hi, old = max(ratio[2], ratio[0]), ratio[1], ratio[2]
        x_w, taken = self.x_w, self.taken
        while p < hi and taken[x_w[p]]:
            p += 1
        ratio[2] = p
        if p == hi or self.x_c[p] > self.rem[j]:
            return True
        if p != old:
            self.head_of[x_w[p]].append(j)
        return False

    def _coverage_test(self, j: int) -> bool:
        """Affordable untaken candidates cannot cover what ``j`` still needs."""
        need = self.need[j]
        cover = 0
        wbits, taken, r_w = self.g.wbits, self.taken, self.r_w
        p, hi = self.order[j]
        for k in range(p, hi):
            wi = r_w[k]
            if not taken[wi]:
                cover |= wbits[wi]
                if cover & need == need:
                    return False
        return True

    def _head(self, j: int) -> int:
        """Cursor of the best untaken candidate of ``j`` (-1 when exhausted)."""
        order = self.order[j]
        p, hi = order
        taken, r_w = self.taken, self.r_w
        while p < hi and taken[r_w[p]]:
            p += 1
        order[0] = p
        if p == hi:
            self.alive[j] = 0
            return -1
        return p

    def _entry(self, j: int, p: int) -> tuple:
        return (self.r_negq[p], self.r_wid[p], self.g.tids[j], p, j, self.version[j])

    def _worker_taken(self, wi: int, j: int) -> None:
        alive = self.alive
        for k in self.head_of.pop(wi, ()):
            if alive[k] and k != j:
                _, hi, p = self.ratio[k]
                if p < hi and self.x_w[p] == wi and self._ratio_test(k):
                    self.counters["pruned_tasks"] += 1
                    alive[k] = 0

    def run(self) -> None:
        g = self.g
        self._prepare_all()
        heap = []
        for j in self.tasks:
            if self.alive[j]:
                p = self._head(j)
                if p >= 0:
                    heap.append(self._entry(j, p))
        heapq.heapify(heap)
        alive, version, taken = self.alive, self.version, self.taken
        tbits, wbits = g.tbits, g.wbits
        r_w, r_c, r_ds = self.r_w, self.r_c, self.r_ds
        while heap:
            _, _, _, p, j, ver = heapq.heappop(heap)
            if not alive[j] or ver != version[j]:
                continue
            wi = r_w[p]
            if taken[wi]:
                p = self._head(j)
                if p >= 0:
                    heapq.heappush(heap, self._entry(j, p))
                continue
            if self.prune and self._coverage_test(j):
                self.counters["pruned_tasks"] += 1
                alive[j] = 0
                continue
            c = r_c[p]
            taken[wi] = 1
            self.commits.append((wi, j, c, r_ds[p]))
            self.counters["rounds"] += 1
            self.need[j] &= ~wbits[wi]
            self.rem[j] -= c
            version[j] += 1
            if not self.need[j] & tbits[j]:
                alive[j] = 0
            if self.prune:
                self._worker_taken(wi, j)
            if alive[j] and self._prepare(j):
                p = self._head(j)
                if p >= 0:
                    heapq.heappush(heap, self._entry(j, p))
            r_w, r_c, r_ds = self.r_w, self.r_c, self.r_ds

    def result(self) -> AssignmentInstance:
        return _build_result(self.g, self.commits, self.counters)


def solve_greedy(graph: ValidPairGraph, tasks: list[int] | None = None, *,
                 prune: bool = True, incremental: bool = True) -> AssignmentInstance:
    """Greedy solver over the valid pairs of ``tasks`` (task indices; all by default).

    Each step commits the pair with the largest score increase; ties go to
    the lowest worker id, then the lowest task id.  A task leaves the pool
    once its skills are covered, once no affordable useful candidate is
    left, or when the insufficient-budget rule fires.  Workers already
    committed to a task that later drops out stay in the assignment.

    The result carries ``counters`` (pairs evaluated, pairs/tasks pruned per
    rule, rounds) and a ``trace`` of committed (worker id, task id, increase).
    """
    if incremental:
        solver = _IncrementalGreedy(graph, tasks, prune)
        solver.run()
    else:
        solver = _Greedy(graph, tasks, prune)
        solver.run_full()
    return solver.result()
