"""A small sample-efficiency study on the damped oscillator target.

Uses 3000 points and 30 trials so it runs in well under a minute; the
acceptance suite repeats this at 10^4 points and 200 trials.
"""
import numpy as np

from levpivot.harness import ExperimentConfig, prepare, run_experiment, samples_to_target

base = ExperimentConfig("oscillator2d", n=3000, degree=10, trials=30, seed=11)
data = prepare(base)
print(f"{data.a.shape[1]} features, OPT = {data.opt_error:.3e}")

ks = [66, 80, 95, 115, 140, 170, 200, 250, 300]
curves = {}
for name in ("pivotal_pca", "bernoulli", "uniform"):
    cfg = ExperimentConfig("oscillator2d", sampler=name, n=3000, degree=10, trials=30, seed=11, k_values=ks)
    curves[name] = run_experiment(cfg, data)

print("   k  " + "  ".join(f"{name:>12s}" for name in curves))
for i, k in enumerate(ks):
    row = "  ".join(f"{curves[name].medians()[1][i] / data.opt_error:12.2f}" for name in curves)
    print(f"{k:5d} {row}")

table = samples_to_target({n: curves[n] for n in ("pivotal_pca", "bernoulli")}, 2.0)
print("samples to 2 x OPT:", {n: round(v) for n, v in table.samples.items()},
      "ratio", round(table.efficiency, 3))
