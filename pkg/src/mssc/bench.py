"""Parameter sweeps and cost-model calibration.

A sweep varies one generator setting over a list of values.  For every
value it runs ``trials`` generated instances through each solver, timing the
solver on a prebuilt valid-pair graph.  Before the timed trials of a value,
one warm-up instance is solved and discarded.
"""

from __future__ import annotations

import csv
import io
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Iterable, Mapping, Sequence

import numpy as np

from .adaptive import Calibration
from .costmodel import CostModelParams, cost_gdc_remaining, cost_greedy_estimate, estimate_best_g
from .gdc import solve_gdc
from .generate import GeneratorConfig, generate
from .greedy import solve_greedy
from .grid import valid_pairs
from .io import config_from_mapping, config_value
from .solvers import SOLVER_NAMES, make_solver

COLUMNS = ("param", "value", "trial", "solver", "score", "time_ms", "pairs_evaluated")
THREADS_ENV = "MSSC_THREADS"


@dataclass(frozen=True)
class SweepSpec:
    param: str
    values: tuple
    defaults: GeneratorConfig = field(default_factory=GeneratorConfig)
    solvers: tuple[str, ...] = ("greedy", "gdc", "adaptive", "random")
    trials: int = 3
    calibration: Calibration | None = None

    def __post_init__(self):
        names = {f.name for f in fields(GeneratorConfig)} - {"skill_profile"}
        if self.param not in names:
            raise ValueError(f"unknown sweep parameter {self.param!r}")
        if not self.values:
            raise ValueError("a sweep needs at least one value")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        for s in self.solvers:
            if s not in SOLVER_NAMES:
                raise ValueError(f"unknown solver {s!r}")

    def config(self, value, trial: int) -> GeneratorConfig:
        return self.defaults.with_(**{self.param: value, "seed": self.defaults.seed + trial})


def parse_sweep_spec(values: Mapping[str, str]) -> SweepSpec:
    """Sweep spec from key=value settings.

    ``param`` names the varied setting and ``values`` lists its values
    separated by ``;`` (ranges as ``lo:hi``).  ``solvers`` is a comma list,
    ``trials`` a count; every other key is a fixed generator setting.
    """
    values = dict(values)
    try:
        param = values.pop("param")
        raw = values.pop("values")
    except KeyError as exc:
        raise ValueError(f"sweep spec needs {exc.args[0]!r}") from None
    solvers = tuple(s.strip() for s in values.pop("solvers", "greedy,gdc,adaptive,random").split(",") if s.strip())
    trials = int(values.pop("trials", "3"))
    cal = None
    if "c_greedy" in values or "c_gdc" in values:
        cal = Calibration(float(values.pop("c_greedy", "1")), float(values.pop("c_gdc", "1")))
    defaults = config_from_mapping(values)
    vals = tuple(config_value(param, v.strip()) for v in raw.split(";") if v.strip())
    return SweepSpec(param, vals, defaults, solvers, trials, cal)


def thread_cap() -> int:
    """Worker processes allowed by ``MSSC_THREADS`` (default 1)."""
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None


def timed_solve(solver, graph) -> tuple[object, float]:
    graph.warm()
    start = time.perf_counter()
    res = solver(graph)
    return res, (time.perf_counter() - start) * 1000.0


def _point(spec: SweepSpec, value) -> list[dict]:
    solvers = {s: make_solver(s, seed=0, calibration=spec.calibration) for s in spec.solvers}
    warm = valid_pairs(generate(spec.config(value, spec.trials)))
    for s in spec.solvers:
        timed_solve(solvers[s], warm)
    rows = []
    for trial in range(spec.trials):
        graph = valid_pairs(generate(spec.config(value, trial)))
        for s in spec.solvers:
            res, ms = timed_solve(solvers[s], graph)
            rows.append({
                "param": spec.param, "value": _fmt(value), "trial": trial, "solver": s,
                "score": res.score(), "time_ms": ms,
                "pairs_evaluated": (getattr(res, "counters", None) or {}).get("pairs_evaluated", 0),
            })
    return rows


def _fmt(value) -> str:
    if isinstance(value, tuple):
        return f"{value[0]:g}:{value[1]:g}"
    return str(value)


def run_sweep(spec: SweepSpec, threads: int | None = None) -> list[dict]:
    """One row per (value, trial, solver), ordered by value, trial, solver."""
    threads = thread_cap() if threads is None else max(1, threads)
    if threads == 1 or len(spec.values) == 1:
        parts = [_point(spec, v) for v in spec.values]
    else:
        with ProcessPoolExecutor(max_workers=min(threads, len(spec.values))) as pool:
            parts = list(pool.map(_point, [spec] * len(spec.values), spec.values))
    order = {s: i for i, s in enumerate(spec.solvers)}
    rows = [r for part in parts for r in part]
    pos = {_fmt(v): i for i, v in enumerate(spec.values)}
    rows.sort(key=lambda r: (pos[r["value"]], r["trial"], order[r["solver"]]))
    return rows


def point_means(rows: Iterable[dict]) -> list[dict]:
    """Mean score, time and pairs per (value, solver), in first-seen order."""
    groups: dict[tuple, list[dict]] = {}
    for r in rows:
        groups.setdefault((r["param"], r["value"], r["solver"]), []).append(r)
    out = []
    for (param, value, solver), rs in groups.items():
        out.append({
            "param": param, "value": value, "trial": "mean", "solver": solver,
            "score": statistics.fmean(r["score"] for r in rs),
            "time_ms": statistics.fmean(r["time_ms"] for r in rs),
            "pairs_evaluated": statistics.fmean(r["pairs_evaluated"] for r in rs),
        })
    return out


def rows_to_csv(rows: Iterable[dict], with_means: bool = True) -> str:
    rows = list(rows)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    if with_means:
        w.writerows(point_means(rows))
    return buf.getvalue()


# ---- calibration ----

CALIBRATION_SIZES = (250, 500, 1000)


def _fit(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope through the origin."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    denom = float(x @ x)
    return float(x @ y) / denom if denom > 0 else 1.0


def calibrate(sizes: Sequence[int] = CALIBRATION_SIZES, base: GeneratorConfig | None = None,
              repeats: int = 3) -> Calibration:
    """Fit seconds-per-estimated-operation for greedy and divide-and-conquer.

    Each probe size ``s`` generates an instance with ``m = n = s`` (other
    settings from ``base``), times both solvers (best of ``repeats``), and
    pairs the time with the solver's operation estimate on that instance.
    Each constant is the least-squares slope of time against estimate.
    """
    base = base or GeneratorConfig()
    ops_g, ops_d, t_g, t_d = [], [], [], []
    for i, s in enumerate(sizes):
        graph = valid_pairs(generate(base.with_(m=s, n=s, seed=base.seed + i))).warm()
        deg_t, deg_w, n_s, n_active = graph.stats()
        params = CostModelParams(deg_t, deg_w, n_s)
        g = estimate_best_g(params, s, graph.n)
        ops_g.append(cost_greedy_estimate(n_active, s, deg_t, deg_w))
        ops_d.append(cost_gdc_remaining(1, g, s, n_active, deg_t, deg_w, n_s))
        for ops_t, fn in ((t_g, lambda: solve_greedy(graph)), (t_d, lambda: solve_gdc(graph, g=g))):
            best = float("inf")
            fn()
            for _ in range(repeats):
                start = time.perf_counter()
                fn()
                best = min(best, time.perf_counter() - start)
            ops_t.append(best)
    return Calibration(_fit(ops_g, t_g), _fit(ops_d, t_d))
