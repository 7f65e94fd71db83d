"""Multi-round batch simulation.

Each round lasts one time unit.  The available workers (new arrivals plus
those back from earlier jobs) and the open tasks (new plus carried over) form
the round's instance.  The grid index is kept across rounds and updated with
inserts and removals rather than rebuilt.  After solving:

* workers of completed tasks travel and stay busy for ``ceil(travel time)``
  rounds (at least one), then come back at the task's location;
* workers of incomplete tasks are released for the next round;
* incomplete and unassigned tasks are carried over unchanged.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from typing import Callable

from .generate import GeneratorConfig, generate
from .graph import EntityArrays
from .grid import Grid, choose_tau, retrieve_valid_pairs
from .model import AssignmentInstance, Instance, Task, Worker, dist
from .solvers import Solver

Arrivals = Callable[[int], tuple[list[Worker], list[Task]]]


@dataclass
class RoundReport:
    timestamp: int
    assignment: AssignmentInstance
    completed: set[int]
    score: float
    wall_ms: float
    counters: dict[str, int] = field(default_factory=dict)
    available_workers: int = 0
    busy_workers: int = 0
    open_tasks: int = 0


def generated_arrivals(config: GeneratorConfig) -> Arrivals:
    """Round ``p`` brings a fresh generated batch with ids offset by ``p * n`` / ``p * m``."""

    def arrivals(p: int) -> tuple[list[Worker], list[Task]]:
        inst = generate(config.with_(seed=config.seed + p))
        ws = [replace(w, id=w.id + p * config.n) for w in inst.workers]
        ts = [replace(t, id=t.id + p * config.m) for t in inst.tasks]
        return ws, ts

    return arrivals


def run_rounds(config: GeneratorConfig | None, solver: Solver, rounds: int, *,
               arrivals: Arrivals | None = None, tau: float | None = None,
               bounds: tuple[float, float, float, float] = (0.0, 0.0, 1.0, 1.0),
               max_carry: int | None = None) -> list[RoundReport]:
    """Simulate ``rounds`` rounds and return one report per round.

    ``arrivals(p)`` gives the workers and tasks that appear at round ``p``;
    by default they are generated from ``config``.  ``max_carry`` caps how
    many rounds an unfinished task is carried (None keeps it indefinitely).
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    if arrivals is None:
        if config is None:
            raise ValueError("need a config or an arrivals function")
        arrivals = generated_arrivals(config)
    grid: Grid | None = None
    available: dict[int, Worker] = {}
    busy: dict[int, tuple[int, Worker]] = {}  # id -> (round it is free again, worker)
    open_tasks: dict[int, Task] = {}
    age: dict[int, int] = {}
    reports = []
    for p in range(rounds):
        new_w, new_t = arrivals(p)
        back = [wid for wid, (free_at, _) in busy.items() if free_at <= p]
        incoming = [busy.pop(wid)[1] for wid in sorted(back)] + list(new_w)
        if grid is None:
            if tau is None:
                tau = choose_tau(len(incoming) + len(new_t),
                                 (bounds[2] - bounds[0]) * (bounds[3] - bounds[1]))
            grid = Grid(tau, bounds)
        for w in incoming:
            if w.id in available or w.id in busy:
                raise ValueError(f"worker id {w.id} is already present")
            available[w.id] = w
            grid.insert_worker(w)
        for t in new_t:
            if t.id in open_tasks:
                raise ValueError(f"task id {t.id} is already open")
            open_tasks[t.id] = t
            age[t.id] = 0
            grid.insert_task(t)

        inst = Instance(list(available.values()), list(open_tasks.values()), timestamp=p)
        start = time.perf_counter()
        graph = retrieve_valid_pairs(grid, inst, EntityArrays.from_instance(inst))
        result = solver(graph)
        wall = (time.perf_counter() - start) * 1000.0

        completed = result.completed
        for tid in sorted(completed):
            t = open_tasks.pop(tid)
            age.pop(tid)
            grid.remove_task(tid)
            for wid in sorted(result.members[tid]):
                w = available.pop(wid)
                grid.remove_worker(wid)
                rounds_busy = max(1, math.ceil(dist(w.loc, t.loc) / w.velocity))
                busy[wid] = (p + rounds_busy, replace(w, loc=t.loc))
        for tid in list(open_tasks):
            age[tid] += 1
            if max_carry is not None and age[tid] > max_carry:
                open_tasks.pop(tid)
                age.pop(tid)
                grid.remove_task(tid)

        counters = dict(graph.counters)
        counters.update(getattr(result, "counters", {}) or {})
        counters["pairs_retrieved"] = len(graph)
        reports.append(RoundReport(p, result, set(completed), result.score(), wall, counters,
                                   len(available), len(busy), len(open_tasks)))
    return reports
