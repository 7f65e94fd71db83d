"""Analytic operation-count models for choosing g and for the adaptive switch.

The divide-and-conquer cost of splitting ``m`` tasks into ``g`` groups is

    cost(g) = (m*g + m) * log_g(m)                  decomposition
            + (m - 1) / (g - 1) * deg_t**2          base cases, summed over levels
            + n_s * (deg_w - 1)                     merge conflicts
            + m * n                                 building the pair graph

:func:`estimate_best_g` scans integers for the first non-negative derivative;
:func:`argmin_g` minimises ``cost(g)`` directly.  A common shortcut form of
the derivative divides its first term by ``g * ln(2g)`` where differentiating
``cost`` gives ``g * ln(g)**2``.  It is kept as :func:`ln2g_gdc_derivative`
and selectable with ``ln2g=True``, but its zero crossing comes several steps
early once ``deg_t`` is large.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

G_SCAN_MAX = 64


@dataclass(frozen=True)
class CostModelParams:
    deg_t: float
    deg_w: float
    n_s: int
    c_greedy: float = 1.0
    c_gdc: float = 1.0

    def __post_init__(self):
        if self.deg_t < 0 or self.deg_w < 0 or self.n_s < 0:
            raise ValueError("degrees and conflict count must be non-negative")

    @classmethod
    def from_graph(cls, graph, tasks=None, c_greedy: float = 1.0, c_gdc: float = 1.0) -> "CostModelParams":
        deg_t, deg_w, n_s, _ = graph.stats(tasks)
        return cls(deg_t, deg_w, n_s, c_greedy, c_gdc)


def gdc_cost(g: float, m: int, n: int, deg_t: float, deg_w: float = 0.0, n_s: int = 0) -> float:
    """Estimated operation count of divide-and-conquer with ``g`` groups."""
    if g <= 1:
        raise ValueError("g must exceed 1")
    if m <= 1:
        levels = 0.0
    else:
        levels = math.log(m) / math.log(g)
    f_d = (m * g + m) * levels
    f_c = (m - 1) / (g - 1) * deg_t ** 2
    f_m = n_s * (deg_w - 1) if n_s else 0.0
    return f_d + f_c + f_m + m * n


def gdc_cost_derivative(g: float, m: int, deg_t: float) -> float:
    """Derivative of :func:`gdc_cost` with respect to ``g``."""
    lg = math.log(g)
    first = m * math.log(m) * (g * lg - g - 1) / (g * lg * lg)
    return first - (m - 1) / (g - 1) ** 2 * deg_t ** 2


def ln2g_gdc_derivative(g: float, m: int, deg_t: float) -> float:
    """Shortcut form of the derivative with ``ln(2g)`` in the first denominator."""
    lg = math.log(g)
    first = m * math.log(m) * (g * lg - g - 1) / (g * math.log(2 * g))
    return first + (1 - m) / (1 - g) ** 2 * deg_t ** 2


def estimate_best_g(params: CostModelParams, m: int, n: int = 0, g_max: int | None = None,
                    ln2g: bool = False) -> int:
    """Integer ``g >= 2`` minimising the cost, located by a derivative scan.

    The scan finds the first ``g`` whose derivative is non-negative.  Since
    ``cost(g)`` is convex for ``g >= 2`` the minimiser is that ``g`` or the one
    before it, and the cheaper of the two is returned.  With
    ``ln2g=True`` the shortcut derivative is scanned instead and its first
    crossing returned as is.  ``m < 2`` has nothing to split and returns
    1.  The scan stops at ``min(m, g_max)`` (``G_SCAN_MAX`` by default);
    ``g = m`` already gives singleton groups.
    """
    if m < 2:
        return 1
    cap = G_SCAN_MAX if g_max is None else g_max
    top = max(2, min(m, cap))
    deriv = ln2g_gdc_derivative if ln2g else gdc_cost_derivative
    for g in range(2, top + 1):
        if deriv(g, m, params.deg_t) >= 0:
            if ln2g or g == 2:
                return g
            cost = lambda x: gdc_cost(x, m, 0, params.deg_t)
            return g - 1 if cost(g - 1) <= cost(g) else g
    return top


def argmin_g(params: CostModelParams, m: int, n: int = 0, lo: int = 2, hi: int = G_SCAN_MAX) -> int:
    """Integer ``g`` in ``[lo, hi]`` minimising :func:`gdc_cost` (smallest on ties)."""
    if m < 2:
        return 1
    return min(range(lo, hi + 1),
               key=lambda g: (gdc_cost(g, m, n, params.deg_t, params.deg_w, params.n_s), g))


def cost_greedy_estimate(n: int, m: int, deg_t: float, deg_w: float, c_greedy: float = 1.0) -> float:
    return c_greedy * (m * n + n * deg_t * (3 * m + deg_w) + m * deg_t ** 2)


def levels(m: float, g: int) -> int:
    """Smallest ``L`` with ``g**L >= m``; exact integer arithmetic."""
    if m <= 1:
        return 0
    L, p = 0, 1
    while p < m:
        p *= g
        L += 1
    return L


def base_case_cost(x: float, g: int, deg_t: float) -> float:
    """Operations to solve a subproblem of ``x`` tasks down to single-task leaves."""
    leaves = 1
    while x > 1:
        x = math.ceil(x / g)
        leaves *= g
    return leaves * deg_t ** 2


def cost_gdc_remaining(k: int, g: int, m: int, n: int, deg_t: float, deg_w: float,
                       n_s: int, c_gdc: float = 1.0) -> float:
    """Estimated operations for divide-and-conquer from level ``k`` downwards."""
    if k < 1:
        raise ValueError("level k starts at 1")
    g = max(g, 2)
    f_d = m * n + (m * g + m) * k
    top = max(k, levels(m, g))
    f_c = sum(base_case_cost(m / g ** i, g, deg_t) for i in range(k, top + 1))
    f_m = n_s * (deg_w - 1) if n_s else 0.0
    return c_gdc * (f_d + f_c + f_m)


@dataclass(frozen=True)
class AdaptiveCosts:
    cost_greedy: float
    cost_gdc: float
    level: int
    g: int

    @property
    def use_greedy(self) -> bool:
        return self.cost_greedy < self.cost_gdc


def adaptive_costs(params: CostModelParams, m: int, n: int, k: int) -> AdaptiveCosts:
    g = estimate_best_g(params, m, n)
    cg = cost_greedy_estimate(n, m, params.deg_t, params.deg_w, params.c_greedy)
    cd = cost_gdc_remaining(k, g, m, n, params.deg_t, params.deg_w, params.n_s, params.c_gdc)
    return AdaptiveCosts(cg, cd, k, g)
