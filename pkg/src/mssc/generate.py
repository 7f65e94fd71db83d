"""Synthetic instance generator.

Locations are uniform in the unit square or skewed (most points in one
Gaussian blob around the centre, the rest uniform).  Velocities, deadlines
and budgets use a truncated-Gaussian mapping onto their range; unit costs
and move distances are uniform.  Skill sets come from a :class:`SkillProfile`.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace

import numpy as np

from .model import Instance, MSSCError, Task, Worker
from .skills import SkillSet

Range = tuple[float, float]

GAUSS_SIGMA = 0.2
SKEW_FRACTION = 0.9
SKEW_CENTER = (0.5, 0.5)
SKEW_SIGMA = 0.2


class InvalidRange(MSSCError, ValueError):
    pass


@dataclass(frozen=True)
class SkillProfile:
    """How skill sets are drawn.

    By default: ``universe`` skills ranked by Zipf popularity, worker set
    sizes Zipf-distributed on ``worker_sizes``, task sizes uniform on
    ``task_sizes``.  Passing ``worker_templates`` / ``task_templates``
    (lists of (skill indices, weight)) switches that side to sampling whole
    templates from the catalog instead.
    """

    universe: int = 50
    worker_sizes: tuple[int, int] = (1, 6)
    worker_size_exponent: float = 1.0
    task_sizes: tuple[int, int] = (3, 8)
    popularity_exponent: float = 1.0
    worker_templates: tuple[tuple[tuple[int, ...], float], ...] | None = None
    task_templates: tuple[tuple[tuple[int, ...], float], ...] | None = None

    def validate(self) -> None:
        for name, (lo, hi) in (("worker_sizes", self.worker_sizes), ("task_sizes", self.task_sizes)):
            if not 1 <= lo <= hi <= self.universe:
                raise InvalidRange(f"{name}={lo, hi} must satisfy 1 <= lo <= hi <= universe")
        for name, cat in (("worker_templates", self.worker_templates), ("task_templates", self.task_templates)):
            if cat is not None:
                if not cat or any(not s or w <= 0 for s, w in cat):
                    raise InvalidRange(f"{name}: templates need nonempty skills and positive weights")
                if any(k < 0 for s, _ in cat for k in s):
                    raise InvalidRange(f"{name}: negative skill index")

    def popularity(self) -> np.ndarray:
        p = 1.0 / np.arange(1, self.universe + 1) ** self.popularity_exponent
        return p / p.sum()

    def _from_catalog(self, rng: np.random.Generator, count: int, cat) -> list[SkillSet]:
        w = np.array([wt for _, wt in cat], dtype=np.float64)
        idx = rng.choice(len(cat), size=count, p=w / w.sum())
        sets = [SkillSet.of(s) for s, _ in cat]
        return [sets[i] for i in idx.tolist()]

    def _sample(self, rng: np.random.Generator, sizes: np.ndarray) -> list[SkillSet]:
        # Gumbel top-k draws ``size`` distinct skills with popularity weights
        count = len(sizes)
        if count == 0:
            return []
        keys = np.log(self.popularity())[None, :] + rng.gumbel(size=(count, self.universe))
        order = np.argsort(-keys, axis=1)
        out = []
        for row, k in zip(order.tolist(), sizes.tolist()):
            bits = 0
            for s in row[:k]:
                bits |= 1 << s
            out.append(SkillSet(bits))
        return out

    def worker_skills(self, rng: np.random.Generator, count: int) -> list[SkillSet]:
        if self.worker_templates is not None:
            return self._from_catalog(rng, count, self.worker_templates)
        lo, hi = self.worker_sizes
        ks = np.arange(lo, hi + 1)
        p = 1.0 / ks ** self.worker_size_exponent
        return self._sample(rng, rng.choice(ks, size=count, p=p / p.sum()))

    def task_skills(self, rng: np.random.Generator, count: int) -> list[SkillSet]:
        if self.task_templates is not None:
            return self._from_catalog(rng, count, self.task_templates)
        lo, hi = self.task_sizes
        return self._sample(rng, rng.integers(lo, hi + 1, size=count))


@dataclass(frozen=True)
class GeneratorConfig:
    m: int = 5000
    n: int = 5000
    spatial_dist: str = "uniform"
    budget_range: Range = (5.0, 10.0)
    velocity_range: Range = (0.2, 0.3)
    unit_cost_range: Range = (20.0, 30.0)
    move_dist_range: Range = (0.3, 0.4)
    deadline_range: Range = (1.0, 2.0)
    skill_profile: SkillProfile = field(default_factory=SkillProfile)
    seed: int = 0

    def validate(self) -> None:
        if self.m < 0 or self.n < 0:
            raise InvalidRange("counts must be >= 0")
        if self.spatial_dist not in ("uniform", "skewed"):
            raise InvalidRange(f"unknown spatial_dist {self.spatial_dist!r}")
        for f in fields(self):
            if f.name.endswith("_range"):
                lo, hi = getattr(self, f.name)
                if not lo <= hi:
                    raise InvalidRange(f"{f.name}: lower {lo} > upper {hi}")
                if lo < 0:
                    raise InvalidRange(f"{f.name}: negative lower bound {lo}")
        if self.velocity_range[0] <= 0:
            raise InvalidRange("velocity_range must be positive")
        if self.deadline_range[0] <= 0:
            raise InvalidRange("deadline_range must be positive")
        self.skill_profile.validate()

    def with_(self, **changes) -> "GeneratorConfig":
        return replace(self, **changes)


def gaussian_in_range(rng: np.random.Generator, lo: float, hi: float, size: int,
                      sigma: float = GAUSS_SIGMA) -> np.ndarray:
    """N(0, sigma^2) samples redrawn until inside [-1, 1], mapped onto [lo, hi]."""
    out = np.empty(size)
    filled = 0
    while filled < size:
        x = rng.normal(0.0, sigma, size=size - filled)
        x = x[np.abs(x) <= 1.0]
        out[filled:filled + len(x)] = x
        filled += len(x)
    return lo + (out + 1.0) / 2.0 * (hi - lo)


def locations(rng: np.random.Generator, count: int, dist: str) -> np.ndarray:
    if dist == "uniform":
        return rng.random((count, 2))
    pts = rng.random((count, 2))
    clustered = rng.random(count) < SKEW_FRACTION
    k = int(clustered.sum())
    blob = np.empty((k, 2))
    filled = 0
    while filled < k:
        x = rng.normal(SKEW_CENTER, SKEW_SIGMA, size=(k - filled, 2))
        x = x[np.all((x >= 0.0) & (x <= 1.0), axis=1)]
        blob[filled:filled + len(x)] = x
        filled += len(x)
    pts[clustered] = blob
    return pts


def generate(config: GeneratorConfig) -> Instance:
    """Draw an instance; the same config (seed included) gives the same instance."""
    config.validate()
    rng = np.random.default_rng(config.seed)
    n, m = config.n, config.m
    wloc = locations(rng, n, config.spatial_dist)
    v = gaussian_in_range(rng, *config.velocity_range, n)
    c = rng.uniform(*config.unit_cost_range, n)
    d = rng.uniform(*config.move_dist_range, n)
    wsk = config.skill_profile.worker_skills(rng, n)
    tloc = locations(rng, m, config.spatial_dist)
    e = gaussian_in_range(rng, *config.deadline_range, m)
    b = gaussian_in_range(rng, *config.budget_range, m)
    tsk = config.skill_profile.task_skills(rng, m)
    workers = [Worker(i, (float(x), float(y)), float(vi), float(di), float(ci), s)
               for i, ((x, y), vi, di, ci, s) in enumerate(zip(wloc.tolist(), v.tolist(), d.tolist(), c.tolist(), wsk))]
    tasks = [Task(j, (float(x), float(y)), float(ej), float(bj), s)
             for j, ((x, y), ej, bj, s) in enumerate(zip(tloc.tolist(), e.tolist(), b.tolist(), tsk))]
    universe = config.skill_profile.universe
    if config.skill_profile.worker_templates or config.skill_profile.task_templates:
        universe = max(universe, max((s.width() for s in wsk + tsk), default=0))
    return Instance(workers, tasks, skill_names=[f"s{k}" for k in range(universe)])
