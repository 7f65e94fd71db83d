"""Name -> solver lookup shared by the simulator, the sweep harness and the CLI."""

from __future__ import annotations

from typing import Callable

from .adaptive import Calibration, solve_adaptive
from .baselines import solve_exact, solve_random
from .gdc import solve_gdc
from .graph import ValidPairGraph
from .greedy import solve_greedy
from .model import AssignmentInstance

Solver = Callable[[ValidPairGraph], AssignmentInstance]

SOLVER_NAMES = ("greedy", "gdc", "adaptive", "random", "exact")


def _exact(graph: ValidPairGraph) -> AssignmentInstance:
    res = solve_exact(graph)
    a = res.best_assignment
    a.counters = {"assignments_enumerated": res.assignments_enumerated}
    return a


def make_solver(name: str, *, seed: int = 0, runs: int = 10,
                calibration: Calibration | None = None, g: int | None = None) -> Solver:
    """Solver taking only the valid-pair graph, with the other knobs bound."""
    if name == "greedy":
        return solve_greedy
    if name == "gdc":
        return lambda graph: solve_gdc(graph, g=g)
    if name == "adaptive":
        return lambda graph: solve_adaptive(graph, calibration=calibration)
    if name == "random":
        return lambda graph: solve_random(graph, runs=runs, seed=seed)
    if name == "exact":
        return _exact
    raise ValueError(f"unknown solver {name!r}; choose from {', '.join(SOLVER_NAMES)}")
