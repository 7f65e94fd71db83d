"""Assignment of multi-skilled mobile workers to spatial tasks."""

from .adaptive import Calibration, solve_adaptive
from .baselines import InstanceTooLarge, OracleResult, solve_exact, solve_random
from .costmodel import CostModelParams, argmin_g, estimate_best_g, gdc_cost
from .gdc import Subproblem, decompose, reconcile_merge, set_cover_greedy, solve_gdc
from .generate import GeneratorConfig, SkillProfile, generate
from .graph import ValidPairGraph, exhaustive_valid_pairs
from .greedy import solve_greedy
from .grid import Grid, build, retrieve_valid_pairs, valid_pairs
from .model import (EPS, AssignmentInstance, Instance, MSSCError, Task, Worker, assignment_score,
                    dist, flexible_budget, is_valid_pair, score_increase, travel_cost)
from .simulate import RoundReport, run_rounds
from .skills import SkillSet
from .solvers import make_solver

__all__ = [
    "EPS", "AssignmentInstance", "Calibration", "CostModelParams", "GeneratorConfig", "Grid",
    "Instance", "InstanceTooLarge", "MSSCError", "OracleResult", "RoundReport", "SkillProfile",
    "SkillSet", "Subproblem", "Task", "ValidPairGraph", "Worker", "argmin_g", "assignment_score",
    "build", "decompose", "dist", "estimate_best_g", "exhaustive_valid_pairs", "flexible_budget",
    "gdc_cost", "generate", "is_valid_pair", "make_solver", "reconcile_merge", "retrieve_valid_pairs",
    "run_rounds", "score_increase", "set_cover_greedy", "solve_adaptive", "solve_exact", "solve_gdc",
    "solve_greedy", "solve_random", "travel_cost", "valid_pairs",
]
