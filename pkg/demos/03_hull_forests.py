"""Connectivity of walk-driven hulls.

With Bernoulli steps +-sqrt(kappa), the second slit lands on the first when
kappa < 4 (at height sqrt(4 - kappa)), at its root when kappa = 4, and on
the real line beside it when kappa > 4.
"""
import numpy as np

from discrete_loewner import IncrementLaw, SlitChain, build_forest, forest_stats, knot_values, sample_walk

for kappa in (2.0, 3.0, 4.0, 4.41, 8.0):
    first = build_forest(SlitChain(1, [0.0, np.sqrt(kappa)])).branches[1]
    counts = []
    for r in range(200):
        s = knot_values(sample_walk(IncrementLaw("bernoulli", kappa), 29, seed=3, replica=r))
        counts.append(forest_stats(build_forest(SlitChain(1, s)))["tree_count"])
    print(f"kappa={kappa:5.2f}: second slit attaches at {first.attach:.4f}; "
          f"trees in 200 walks of 30 slits: min {min(counts)}, mean {np.mean(counts):.2f}, max {max(counts)}")
