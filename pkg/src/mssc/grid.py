"""Uniform grid over workers and tasks with per-cell aggregates.

Each cell keeps its member records, a handful of min/max aggregates, two
skill bitmaps (union of worker skills, union of required task skills) and a
cell list of every cell some member worker could reach.  Valid-pair
retrieval walks a worker cell's list and drops whole cells with four cheap
tests before any task in them is looked at.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import EntityArrays, ValidPairGraph, pair_kernel
from .model import Instance, MSSCError, Task, Worker
from .skills import pack

TAU_MIN = 1 / 256
TAU_MAX = 0.5
# objects per cell targeted by the automatic side length (see choose_tau)
OBJECTS_PER_CELL = 48
# slack subtracted from minimum distances so float rounding never prunes a
# cell that holds a boundary-valid partner
_SLACK = 1e-12

PRUNE_DISTANCE, PRUNE_DEADLINE, PRUNE_BUDGET, PRUNE_SKILL = range(4)
STRATEGY_NAMES = ("distance", "deadline", "budget", "skill")


class GridError(MSSCError):
    pass


class OutOfBounds(GridError, ValueError):
    pass


class DuplicateId(GridError, KeyError):
    pass


class UnknownId(GridError, KeyError):
    pass


@dataclass
class GridCell:
    cid: int
    ix: int
    iy: int
    rect: tuple[float, float, float, float]
    workers: dict[int, Worker] = field(default_factory=dict)
    tasks: dict[int, Task] = field(default_factory=dict)
    c_min: float = math.inf
    d_max: float = -math.inf
    v_max: float = -math.inf
    e_max: float = -math.inf
    b_max: float = -math.inf
    bm_x: int = 0
    bm_y: int = 0

    def add_worker_stats(self, w: Worker) -> None:
        self.c_min = min(self.c_min, w.unit_cost)
        self.d_max = max(self.d_max, w.max_dist)
        self.v_max = max(self.v_max, w.velocity)
        self.bm_x |= w.skills.bits

    def add_task_stats(self, t: Task) -> None:
        self.e_max = max(self.e_max, t.deadline)
        self.b_max = max(self.b_max, t.budget)
        self.bm_y |= t.required.bits

    def recompute_worker_stats(self) -> None:
        self.c_min, self.d_max, self.v_max, self.bm_x = math.inf, -math.inf, -math.inf, 0
        for w in self.workers.values():
            self.add_worker_stats(w)

    def recompute_task_stats(self) -> None:
        self.e_max, self.b_max, self.bm_y = -math.inf, -math.inf, 0
        for t in self.tasks.values():
            self.add_task_stats(t)

    def stats(self) -> tuple:
        return (self.c_min, self.d_max, self.v_max, self.e_max, self.b_max, self.bm_x, self.bm_y)


def min_dist_to_rect(x: float, y: float, rect: tuple[float, float, float, float]) -> float:
    x0, y0, x1, y1 = rect
    dx = max(x0 - x, 0.0, x - x1)
    dy = max(y0 - y, 0.0, y - y1)
    return math.hypot(dx, dy)


def cell_prunable(w: Worker, cell: GridCell) -> bool:
    return prune_reason(w, cell) is not None


def prune_reason(w: Worker, cell: GridCell) -> int | None:
    """Index of the first pruning strategy that discards ``cell`` for ``w``."""
    mind = max(0.0, min_dist_to_rect(w.loc[0], w.loc[1], cell.rect) - _SLACK)
    if w.max_dist < mind:
        return PRUNE_DISTANCE
    if mind / w.velocity > cell.e_max:
        return PRUNE_DEADLINE
    if mind * w.unit_cost > cell.b_max:
        return PRUNE_BUDGET
    if w.skills.bits & cell.bm_y == 0:
        return PRUNE_SKILL
    return None


def choose_tau(n_objects: int, area: float = 1.0, per_cell: float = OBJECTS_PER_CELL) -> float:
    tau = math.sqrt(area * per_cell / max(n_objects, 1))
    return min(TAU_MAX, max(TAU_MIN, tau))


class Grid:
    def __init__(self, tau: float, bounds: tuple[float, float, float, float] = (0.0, 0.0, 1.0, 1.0)):
        x0, y0, x1, y1 = bounds
        if not (tau > 0 and x1 > x0 and y1 > y0):
            raise ValueError("grid needs tau > 0 and a non-empty box")
        self.tau = tau
        self.bounds = bounds
        self.nx = max(1, math.ceil((x1 - x0) / tau - 1e-12))
        self.ny = max(1, math.ceil((y1 - y0) / tau - 1e-12))
        self.cells: list[GridCell] = []
        for iy in range(self.ny):
            for ix in range(self.nx):
                rect = (x0 + ix * tau, y0 + iy * tau, min(x1, x0 + (ix + 1) * tau), min(y1, y0 + (iy + 1) * tau))
                self.cells.append(GridCell(iy * self.nx + ix, ix, iy, rect))
        self.worker_cell: dict[int, int] = {}
        self.task_cell: dict[int, int] = {}
        self._clists: dict[int, frozenset[int]] = {}
        self._horizon = -math.inf

    # -- placement -----------------------------------------------------
    def cell_index(self, loc: tuple[float, float]) -> int:
        x0, y0, x1, y1 = self.bounds
        x, y = loc
        if not (x0 <= x <= x1 and y0 <= y <= y1):
            raise OutOfBounds(f"location {loc} outside {self.bounds}")
        ix = min(self.nx - 1, int((x - x0) // self.tau))
        iy = min(self.ny - 1, int((y - y0) // self.tau))
        return iy * self.nx + ix

    def cell_of(self, loc: tuple[float, float]) -> GridCell:
        return self.cells[self.cell_index(loc)]

    # -- dynamic maintenance -------------------------------------------
    def insert_worker(self, w: Worker) -> None:
        if w.id in self.worker_cell:
            raise DuplicateId(f"worker {w.id} already indexed")
        cell = self.cell_of(w.loc)
        cell.workers[w.id] = w
        cell.add_worker_stats(w)
        self.worker_cell[w.id] = cell.cid
        self._clists.pop(cell.cid, None)

    def remove_worker(self, wid: int) -> Worker:
        if wid not in self.worker_cell:
            raise UnknownId(f"worker {wid} not indexed")
        cell = self.cells[self.worker_cell.pop(wid)]
        w = cell.workers.pop(wid)
        cell.recompute_worker_stats()
        self._clists.pop(cell.cid, None)
        return w

    def insert_task(self, t: Task) -> None:
        if t.id in self.task_cell:
            raise DuplicateId(f"task {t.id} already indexed")
        cell = self.cell_of(t.loc)
        cell.tasks[t.id] = t
        cell.add_task_stats(t)
        self.task_cell[t.id] = cell.cid
        if t.deadline > self._horizon:
            self._horizon = t.deadline
            self._clists.clear()

    def remove_task(self, tid: int) -> Task:
        if tid not in self.task_cell:
            raise UnknownId(f"task {tid} not indexed")
        cell = self.cells[self.task_cell.pop(tid)]
        t = cell.tasks.pop(tid)
        cell.recompute_task_stats()
        if t.deadline >= self._horizon:
            h = max((c.e_max for c in self.cells), default=-math.inf)
            if h != self._horizon:
                self._horizon = h
                self._clists.clear()
        return t

    @property
    def horizon(self) -> float:
        """Latest deadline among indexed tasks; bounds every worker's reach."""
        return self._horizon

    # -- cell lists -----------------------------------------------------
    def clist(self, cid: int) -> frozenset[int]:
        """Cells reachable by at least one worker in ``cid``.

        A worker's reach is ``min(d_i, v_i * horizon)`` measured to the
        nearest point of the target cell.
        """
        cached = self._clists.get(cid)
        if cached is not None:
            return cached
        cell = self.cells[cid]
        h = self._horizon
        if not cell.workers or h < 0:
            out: frozenset[int] = frozenset()
        else:
            ws = list(cell.workers.values())
            wx = np.array([w.loc[0] for w in ws])
            wy = np.array([w.loc[1] for w in ws])
            reach = np.array([min(w.max_dist, w.velocity * h) for w in ws])
            out = frozenset(self._reachable(wx, wy, reach).tolist())
        self._clists[cid] = out
        return out

    def _reachable(self, wx: np.ndarray, wy: np.ndarray, reach: np.ndarray) -> np.ndarray:
        x0, y0 = self.bounds[0], self.bounds[1]
        r = float(reach.max())
        lo_x = max(0, int((wx.min() - r - x0) // self.tau))
        hi_x = min(self.nx - 1, int((wx.max() + r - x0) // self.tau))
        lo_y = max(0, int((wy.min() - r - y0) // self.tau))
        hi_y = min(self.ny - 1, int((wy.max() + r - y0) // self.tau))
        ixs, iys = np.meshgrid(np.arange(lo_x, hi_x + 1), np.arange(lo_y, hi_y + 1))
        cids = (iys * self.nx + ixs).ravel()
        mind = self._mind(wx, wy, cids)
        hit = (mind <= reach[:, None]).any(axis=0)
        return cids[hit]

    def _mind(self, wx: np.ndarray, wy: np.ndarray, cids: np.ndarray) -> np.ndarray:
        rx0, ry0, rx1, ry1 = self.rect_arrays()
        rx0, ry0, rx1, ry1 = rx0[cids], ry0[cids], rx1[cids], ry1[cids]
        dx = np.maximum(np.maximum(rx0[None, :] - wx[:, None], 0.0), wx[:, None] - rx1[None, :])
        dy = np.maximum(np.maximum(ry0[None, :] - wy[:, None], 0.0), wy[:, None] - ry1[None, :])
        return np.maximum(np.hypot(dx, dy) - _SLACK, 0.0)

    def rect_arrays(self) -> tuple[np.ndarray, ...]:
        rects = getattr(self, "_rects", None)
        if rects is None:
            r = np.array([c.rect for c in self.cells])
            rects = self._rects = (r[:, 0], r[:, 1], r[:, 2], r[:, 3])
        return rects

    # -- inspection -----------------------------------------------------
    def snapshot(self) -> dict:
        """Hashable view of the full index state, for equality checks."""
        out = {}
        for c in self.cells:
            out[c.cid] = (
                tuple(sorted(c.workers)),
                tuple(sorted(c.tasks)),
                c.stats(),
                self.clist(c.cid),
            )
        return out

    def __iter__(self):
        return iter(self.cells)


def bounding_box(instance: Instance, pad: float = 1e-9) -> tuple[float, float, float, float]:
    pts = [w.loc for w in instance.workers] + [t.loc for t in instance.tasks]
    if not pts:
        return (0.0, 0.0, 1.0, 1.0)
    xs, ys = [p[0] for p in pts], [p[1] for p in pts]
    return (min(xs) - pad, min(ys) - pad, max(xs) + pad, max(ys) + pad)


def build(instance: Instance, tau: float | None = None,
          bounds: tuple[float, float, float, float] = (0.0, 0.0, 1.0, 1.0)) -> Grid:
    if tau is None:
        area = (bounds[2] - bounds[0]) * (bounds[3] - bounds[1])
        tau = choose_tau(instance.n + instance.m, area)
    grid = Grid(tau, bounds)
    for w in instance.workers:
        grid.insert_worker(w)
    for t in instance.tasks:
        grid.insert_task(t)
    return grid


def insert_worker(grid: Grid, w: Worker) -> None:
    grid.insert_worker(w)


def remove_worker(grid: Grid, w: Worker | int) -> None:
    grid.remove_worker(w if isinstance(w, int) else w.id)


def insert_task(grid: Grid, t: Task) -> None:
    grid.insert_task(t)


def remove_task(grid: Grid, t: Task | int) -> None:
    grid.remove_task(t if isinstance(t, int) else t.id)


def retrieve_valid_pairs(grid: Grid, instance: Instance, arrays: EntityArrays | None = None) -> ValidPairGraph:
    """Valid pairs of ``instance`` found through the cell lists of ``grid``.

    Workers are processed one cell at a time.  For every (worker, listed
    cell) combination the four cell strategies are evaluated as array
    operations; only tasks in surviving cells reach the pair kernel.
    ``graph.counters`` records cells pruned per strategy and the number of
    pairs handed to the kernel.
    """
    a = arrays or EntityArrays.from_instance(instance)
    widx = {w.id: i for i, w in enumerate(instance.workers)}
    tidx = {t.id: j for j, t in enumerate(instance.tasks)}
    ncell = len(grid.cells)

    # tasks grouped by cell, contiguous in `cell_tasks`
    tcell = np.full(instance.m, -1, dtype=np.int64)
    for tid, cid in grid.task_cell.items():
        if tid in tidx:
            tcell[tidx[tid]] = cid
    if instance.m and (tcell < 0).any():
        raise GridError("grid does not index every task of the instance")
    order = np.argsort(tcell, kind="stable")
    cell_tasks = order
    cptr = np.searchsorted(tcell[order], np.arange(ncell + 1))
    ntask = np.diff(cptr)

    e_max = np.array([c.e_max for c in grid.cells])
    b_max = np.array([c.b_max for c in grid.cells])
    words = a.wmask.shape[1]
    bm_y = pack((c.bm_y for c in grid.cells), words)

    pruned = [0, 0, 0, 0]
    checked = 0
    ws, ts, cs = [], [], []
    for cell in grid.cells:
        if not cell.workers:
            continue
        wi = np.array([widx[wid] for wid in cell.workers if wid in widx], dtype=np.int64)
        if not len(wi):
            continue
        cl = np.fromiter(grid.clist(cell.cid), dtype=np.int64)
        cl = cl[ntask[cl] > 0]
        if not len(cl):
            continue
        mind = grid._mind(a.wx[wi], a.wy[wi], cl)
        p_dist = a.max_dist[wi][:, None] < mind
        p_dead = mind / a.velocity[wi][:, None] > e_max[cl][None, :]
        p_budget = mind * a.unit_cost[wi][:, None] > b_max[cl][None, :]
        p_skill = ~np.any((a.wmask[wi][:, None, :] & bm_y[cl][None, :, :]) != 0, axis=-1)
        # tally by first firing strategy
        pruned[0] += int(p_dist.sum())
        rest = ~p_dist
        pruned[1] += int((p_dead & rest).sum())
        rest &= ~p_dead
        pruned[2] += int((p_budget & rest).sum())
        rest &= ~p_budget
        pruned[3] += int((p_skill & rest).sum())
        rest &= ~p_skill
        r, k = np.nonzero(rest)
        if not len(r):
            continue
        kc = cl[k]
        counts = ntask[kc]
        total = int(counts.sum())
        starts = np.repeat(cptr[kc] - np.cumsum(counts) + counts, counts)
        ti = cell_tasks[np.arange(total) + starts]
        wflat = np.repeat(wi[r], counts)
        checked += total
        ok, cost = pair_kernel(a, wflat, ti)
        ws.append(wflat[ok])
        ts.append(ti[ok])
        cs.append(cost[ok])
    if ws:
        g = ValidPairGraph(instance, np.concatenate(ws), np.concatenate(ts), np.concatenate(cs))
    else:
        empty = np.zeros(0, dtype=np.int64)
        g = ValidPairGraph(instance, empty, empty, np.zeros(0))
    g.counters = {f"cells_pruned_{name}": pruned[i] for i, name in enumerate(STRATEGY_NAMES)}
    g.counters["pairs_checked"] = checked
    return g


def valid_pairs(instance: Instance, tau: float | None = None, use_grid: bool = True,
                bounds: tuple[float, float, float, float] | None = None) -> ValidPairGraph:
    """Convenience: index ``instance`` and retrieve its valid-pair graph."""
    from .graph import exhaustive_valid_pairs

    if not use_grid:
        return exhaustive_valid_pairs(instance)
    if bounds is None:
        bounds = (0.0, 0.0, 1.0, 1.0)
        pts = [w.loc for w in instance.workers] + [t.loc for t in instance.tasks]
        if any(not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0) for x, y in pts):
            bounds = bounding_box(instance)
    return retrieve_valid_pairs(build(instance, tau, bounds), instance)
