"""The chain Y_{m+1} = sqrt((Y_m - X')**2 + 4/kappa).

Far from the origin it moves like a Bessel process of dimension 1 + 4/kappa:
2 y E[dY] -> 4/kappa and E[dY**2] -> 1.  Returns to a fixed level become
rare when kappa < 4.
"""
from discrete_loewner import ChainConfig, IncrementLaw, drift_estimate, recurrence_experiment

gauss = IncrementLaw("gaussian", 1.0)
print(" kappa   2y E[dY]     (limit)   E[dY^2]")
for i, kappa in enumerate((1.0, 2.0, 4.0, 8.0)):
    d = drift_estimate(100.0, kappa, gauss, 200_000, seed=i)
    print(f"{kappa:6.1f} {d['scaled_drift']:6.2f} +- {d['scaled_drift_se']:.2f} ({4 / kappa:5.2f})"
          f" {d['second_moment']:7.4f} +- {d['second_moment_se']:.4f}")

for kappa in (2.0, 8.0):
    cfg = ChainConfig(kappa, IncrementLaw("rademacher", 1.0), y0=1.0, horizon=20_000, seed=5)
    res = recurrence_experiment(cfg, level=5.0, replicas=300)
    print(f"kappa={kappa}: returned below 5 after reaching 10 in {res['return_fraction']:.2f} of runs")
