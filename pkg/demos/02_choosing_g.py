"""How the divide-and-conquer group count and the adaptive switch are chosen."""

# %%
import numpy as np

from mssc.costmodel import (CostModelParams, adaptive_costs, argmin_g, estimate_best_g, gdc_cost,
                            ln2g_gdc_derivative)

# The operation estimate as a function of g for 1000 tasks with ten valid
# workers each: decomposition gets dearer with g, base cases get cheaper.
p = CostModelParams(deg_t=10.0, deg_w=10.0, n_s=0)
gs = np.arange(2, 17)
costs = np.array([gdc_cost(g, 1000, 0, p.deg_t) for g in gs])
for g, c in zip(gs, costs):
    print(f"g={g:2d}  cost={c:12.0f}{'  <- min' if c == costs.min() else ''}")

# %%
# The derivative scan lands on the same g as brute force.  The shortcut
# derivative with ln(2g) in its denominator crosses zero a step early.
print("scan:", estimate_best_g(p, 1000), " brute force:", argmin_g(p, 1000),
      " ln(2g) form:", estimate_best_g(p, 1000, ln2g=True))
print("ln(2g) derivative at g=8:", round(ln2g_gdc_derivative(8, 1000, 10.0), 2))

# %%
# Dense graphs push g up until the scan limit.
for deg_t in (0, 5, 20, 60, 120):
    q = CostModelParams(deg_t, 1.0, 0)
    print(f"deg_t={deg_t:3d}  g={estimate_best_g(q, 1000)}")

# %%
# The adaptive solver compares two estimates per subproblem.  Their scale
# depends on per-machine constants; with raw operation counts (1.0 each)
# dividing looks cheap, with calibrated constants greedy usually wins at
# this size.
from mssc.adaptive import Calibration, solve_adaptive
from mssc.generate import GeneratorConfig, generate
from mssc.grid import valid_pairs

g = valid_pairs(generate(GeneratorConfig(m=300, n=300, seed=1)))
stats = g.stats()
params = CostModelParams(*stats[:3])
print(adaptive_costs(params, g.m, stats[3], 1))
for cal in (Calibration(), Calibration(c_greedy=5e-10, c_gdc=1.5e-7)):
    res = solve_adaptive(g, calibration=cal)
    print(cal, "->", res.decisions[:3], "score", round(res.score(), 2))
