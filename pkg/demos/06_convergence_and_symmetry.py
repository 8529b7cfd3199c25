"""Step-driven versus interpolated flows, and the distributional identities.

As n grows the piecewise-constant flow h_n approaches the flow driven by the
interpolated walk; the distance shrinks with the walk's modulus of
continuity.  The increments of a chain are distributed like a fresh chain,
and mirroring the walk mirrors the hull.
"""
from discrete_loewner import IncrementLaw
from discrete_loewner.experiments import convergence_sweep, reflection_test, stationarity_test, trend_test

rows = []
for seed in range(5):
    rows.extend(convergence_sweep(IncrementLaw("bernoulli", 4.0), 1.0, [4, 16, 64], seed, points=101))
for r in rows[:3]:
    print(f"n={r['n']:3d}: path distance {r['path_distance']:.4f}, sup |h_n - h| {r['sup_diff']:.4f}, "
          f"bound {r['bound']:.1f}")
print("trend over 5 seeds:", trend_test(rows))

st = stationarity_test(IncrementLaw("bernoulli", 4.0), 5, 3, 500, seed=1)
print("stationarity p-values:", {k: round(v, 3) for k, v in st.p_values.items()})
rf = reflection_test(IncrementLaw("rademacher", 1.0), 10, 500, seed=1)
print("reflection p-values:  ", {k: round(v, 3) for k, v in rf.p_values.items()})
