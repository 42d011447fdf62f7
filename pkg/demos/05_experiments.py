# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#   kernelspec:
#     display_name: Python 3
#     language: python
#     name: python3
# ---

# %% [markdown]
# # Experiments
#
# Every experiment is a JSON-serialisable config. Results are records of
# (n, replica, seed, value, value/n, stderr, runtime) plus a summary.

# %%
import tempfile
from pathlib import Path

from bisectlimit import ExperimentConfig, run_experiment

# %%
out = Path(tempfile.mkdtemp())
cfg = ExperimentConfig(kind="convergence", model={"type": "regular", "r": 3}, sizes=(12, 16, 20), p=1.0,
                       replicas=8, master_seed=1)
res = run_experiment(cfg, out / "conv.csv")
for row in res.summary:
    print(row)
print(res.report["trend"])
print((out / "conv.csv").read_text().splitlines()[:3])

# %%
cfg = ExperimentConfig(kind="concentration", model={"type": "regular", "r": 3}, sizes=(14,), replicas=500)
rep = run_experiment(cfg).report
for row in rep["grid"][:5]:
    print(f"eps {row['epsilon']:.2f}  empirical {row['empirical']:.3f}  bound {row['bound']:.3f}")

# %%
cfg = ExperimentConfig(kind="conjecture", model={"type": "regular", "r": 3}, sizes=(10, 14, 18), replicas=10)
for row in run_experiment(cfg).report["per_n"]:
    print(row)

# %% [markdown]
# Scanning below p = 1/2 is exploratory: negative slack is reported, not raised.

# %%
cfg = ExperimentConfig(kind="p-scan", model={"type": "regular", "r": 1}, p_grid=(0.0, 0.25, 0.5), max_half_edges=6)
rep = run_experiment(cfg).report
print(rep["checked"], "checks,", len(rep["violations"]), "with negative slack")
print(rep["min_slack"])
