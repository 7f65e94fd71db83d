"""Bipartite graph of valid worker-task pairs, plus the exhaustive scan."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .model import Instance
from .skills import n_words, pack


@dataclass
class EntityArrays:
    """Column view of an instance used by the vectorised pair kernels."""

    wx: np.ndarray
    wy: np.ndarray
    velocity: np.ndarray
    max_dist: np.ndarray
    unit_cost: np.ndarray
    wmask: np.ndarray
    tx: np.ndarray
    ty: np.ndarray
    deadline: np.ndarray
    budget: np.ndarray
    tmask: np.ndarray

    @classmethod
    def from_instance(cls, inst: Instance) -> "EntityArrays":
        words = n_words(inst.universe)
        ws, ts = inst.workers, inst.tasks
        f = lambda xs: np.fromiter(xs, dtype=np.float64)
        return cls(
            wx=f(w.loc[0] for w in ws),
            wy=f(w.loc[1] for w in ws),
            velocity=f(w.velocity for w in ws),
            max_dist=f(w.max_dist for w in ws),
            unit_cost=f(w.unit_cost for w in ws),
            wmask=pack((w.skills.bits for w in ws), words),
            tx=f(t.loc[0] for t in ts),
            ty=f(t.loc[1] for t in ts),
            deadline=f(t.deadline for t in ts),
            budget=f(t.budget for t in ts),
            tmask=pack((t.required.bits for t in ts), words),
        )


def pair_kernel(a: EntityArrays, wi: np.ndarray, ti: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Validity mask and travel cost for aligned index arrays ``wi``/``ti``.

    Both the exhaustive scan and the grid retrieval funnel through here, so
    the two routes agree bit for bit on boundary cases.
    """
    d = np.hypot(a.wx[wi] - a.tx[ti], a.wy[wi] - a.ty[ti])
    cost = a.unit_cost[wi] * d
    ok = d <= a.max_dist[wi]
    ok &= d / a.velocity[wi] <= a.deadline[ti]
    ok &= cost <= a.budget[ti]
    ok &= np.any((a.wmask[wi] & a.tmask[ti]) != 0, axis=-1)
    return ok, cost


class ValidPairGraph:
    """Valid pairs as index arrays sorted by (task, worker).

    Indices refer to positions in ``instance.workers`` / ``instance.tasks``.
    """

    def __init__(self, instance: Instance, w: np.ndarray, t: np.ndarray, cost: np.ndarray):
        w = np.asarray(w, dtype=np.int64)
        t = np.asarray(t, dtype=np.int64)
        if len(w) > 1:
            # pairs are unique, so one unstable sort on a combined key is enough
            order = np.argsort(t * max(instance.n, 1) + w)
        else:
            order = np.arange(len(w))
        self.instance = instance
        self.w = w[order]
        self.t = t[order]
        self.cost = np.asarray(cost, dtype=np.float64)[order]
        self.n = instance.n
        self.m = instance.m
        self.counters: dict[str, int] = {}

    def __len__(self) -> int:
        return len(self.w)

    @cached_property
    def arrays(self) -> EntityArrays:
        return EntityArrays.from_instance(self.instance)

    @cached_property
    def wids(self) -> list[int]:
        return [w.id for w in self.instance.workers]

    @cached_property
    def tids(self) -> list[int]:
        return [t.id for t in self.instance.tasks]

    @cached_property
    def worker_index(self) -> dict[int, int]:
        return {wid: i for i, wid in enumerate(self.wids)}

    @cached_property
    def task_index(self) -> dict[int, int]:
        return {tid: j for j, tid in enumerate(self.tids)}

    @cached_property
    def wbits(self) -> list[int]:
        return [w.skills.bits for w in self.instance.workers]

    @cached_property
    def tbits(self) -> list[int]:
        return [t.required.bits for t in self.instance.tasks]

    @cached_property
    def tbits_count(self) -> list[int]:
        return [b.bit_count() for b in self.tbits]

    @cached_property
    def tbudget(self) -> list[float]:
        return [t.budget for t in self.instance.tasks]

    @cached_property
    def task_xy(self) -> np.ndarray:
        return np.array([t.loc for t in self.instance.tasks], dtype=np.float64).reshape(-1, 2)

    @cached_property
    def task_ptr(self) -> np.ndarray:
        return np.searchsorted(self.t, np.arange(self.m + 1))

    @cached_property
    def task_degree(self) -> np.ndarray:
        return np.diff(self.task_ptr)

    @cached_property
    def worker_degree(self) -> np.ndarray:
        return np.bincount(self.w, minlength=self.n)

    @cached_property
    def task_adj(self) -> list[list[tuple[int, float]]]:
        """Per task: list of (worker index, travel cost), ascending worker index."""
        ptr = self.task_ptr
        ws, cs = self.w.tolist(), self.cost.tolist()
        return [list(zip(ws[ptr[j]:ptr[j + 1]], cs[ptr[j]:ptr[j + 1]])) for j in range(self.m)]

    @cached_property
    def worker_adj(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for wi, ti in zip(self.w.tolist(), self.t.tolist()):
            adj[wi].append(ti)
        return adj

    @cached_property
    def worker_adj_cost(self) -> list[list[tuple[int, float]]]:
        """Per worker: list of (task index, travel cost)."""
        adj: list[list[tuple[int, float]]] = [[] for _ in range(self.n)]
        for wi, ti, c in zip(self.w.tolist(), self.t.tolist(), self.cost.tolist()):
            adj[wi].append((ti, c))
        return adj

    @cached_property
    def cost_of(self) -> dict[tuple[int, int], float]:
        return dict(zip(zip(self.w.tolist(), self.t.tolist()), self.cost.tolist()))

    def warm(self) -> "ValidPairGraph":
        """Build the lazily cached lookups now, so solver timings exclude them."""
        for name in ("arrays", "wids", "tids", "worker_index", "task_index", "wbits", "tbits",
                     "tbits_count", "tbudget", "task_xy", "task_ptr", "task_degree", "worker_degree",
                     "task_adj", "worker_adj_cost"):
            getattr(self, name)
        return self

    def edge_skill_counts(self) -> np.ndarray:
        """Per edge: number of the task's required skills the worker has."""
        a = self.arrays
        return np.bitwise_count(a.wmask[self.w] & a.tmask[self.t]).sum(axis=1)

    def edge_set(self) -> set[tuple[int, int]]:
        """Edges as (worker id, task id)."""
        wids, tids = self.wids, self.tids
        return {(wids[a], tids[b]) for a, b in zip(self.w.tolist(), self.t.tolist())}

    def stats(self, tasks: list[int] | None = None) -> tuple[float, float, int, int]:
        """(deg_t, deg_w, n_s, n_active) measured on the subgraph of ``tasks``.

        ``n_active`` counts workers with at least one edge into ``tasks``;
        ``n_s`` counts those with more than one (the conflicting workers).
        """
        if tasks is None:
            deg = self.worker_degree
            m = self.m
            n_edges = len(self)
        else:
            adj = self.task_adj
            m = len(tasks)
            ws = [wi for j in tasks for wi, _ in adj[j]]
            n_edges = len(ws)
            deg = np.bincount(np.asarray(ws, dtype=np.int64), minlength=1) if ws else np.zeros(1, dtype=np.int64)
        active = int(np.count_nonzero(deg))
        deg_t = n_edges / m if m else 0.0
        deg_w = n_edges / active if active else 0.0
        return deg_t, deg_w, int(np.count_nonzero(deg > 1)), active


def exhaustive_valid_pairs(instance: Instance, arrays: EntityArrays | None = None,
                           chunk: int = 1 << 22) -> ValidPairGraph:
    """All-pairs scan: every (worker, task) combination goes through the kernel."""
    a = arrays or EntityArrays.from_instance(instance)
    n, m = instance.n, instance.m
    ws, ts, cs = [], [], []
    if n and m:
        rows = max(1, chunk // m)
        tcol = np.arange(m, dtype=np.int64)
        for lo in range(0, n, rows):
            hi = min(n, lo + rows)
            wi = np.repeat(np.arange(lo, hi, dtype=np.int64), m)
            ti = np.tile(tcol, hi - lo)
            ok, cost = pair_kernel(a, wi, ti)
            ws.append(wi[ok])
            ts.append(ti[ok])
            cs.append(cost[ok])
    if ws:
        return ValidPairGraph(instance, np.concatenate(ws), np.concatenate(ts), np.concatenate(cs))
    empty = np.zeros(0, dtype=np.int64)
    return ValidPairGraph(instance, empty, empty, np.zeros(0))
