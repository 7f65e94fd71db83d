"""Several rounds of arrivals, then a small parameter sweep written as CSV."""

# %%
from mssc.generate import GeneratorConfig
from mssc.simulate import run_rounds
from mssc.solvers import make_solver

cfg = GeneratorConfig(m=150, n=150, seed=3)
reports = run_rounds(cfg, make_solver("greedy"), rounds=5)
for r in reports:
    print(f"round {r.timestamp}: score {r.score:7.2f}, completed {len(r.completed):3d}, "
          f"available {r.available_workers:3d}, busy {r.busy_workers:3d}, open tasks {r.open_tasks:3d}")
print("total:", round(sum(r.score for r in reports), 2))

# %%
# Workers of finished tasks are away for a few rounds (the busy column).
# Each round brings as many tasks as workers while most tasks need several
# workers, so open tasks pile up and wait for later rounds.

# %%
# A sweep varies one generator setting.  Bigger budgets make more tasks
# worth finishing, so every solver's mean score climbs.
from mssc.bench import SweepSpec, point_means, rows_to_csv, run_sweep

spec = SweepSpec("budget_range", ((1.0, 5.0), (10.0, 15.0), (20.0, 25.0)),
                 cfg, ("greedy", "gdc", "random"), trials=2)
rows = run_sweep(spec)
for row in point_means(rows):
    print(f"{row['value']:>7} {row['solver']:>7} score {row['score']:8.2f}  {row['time_ms']:7.1f} ms")
print(rows_to_csv(rows, with_means=False).splitlines()[0])
