"""Forward and reverse Loewner flows.

The forward flow g' = 2/(g - psi) swallows points that hit the driver; the
reverse flow gives the conformal map f(t) whose image misses the hull.
"""
import numpy as np

from discrete_loewner import (
    DriverFunction,
    IncrementLaw,
    capacity_estimate,
    hull_interval,
    sample_walk,
    solve_forward,
    solve_reverse,
)

zero = DriverFunction.constant(0.0)
print("g(0.75; 2i)  =", solve_forward(zero, 2j, 0.75).value)   # i
r = solve_forward(zero, 2j, 2.0)
print("2i is", r.status, "at time", round(r.swallow_time, 9))  # 1
print("hull footprint at t=1:", hull_interval(zero, 1.0))      # [-2, 2]

# a walk driver: step version (exact slit composition) versus interpolation (ODE)
w = sample_walk(IncrementLaw("bernoulli", 2.0), 8, seed=1, n=4)
step = DriverFunction.from_walk(w, "step")
lin = DriverFunction.from_walk(w, "linear")
z = np.array([0.5j, 1 + 0.5j, -1 + 0.5j])
print("h_n(2; z)    =", np.round(solve_reverse(step, z, 2.0), 6))
print("h(2; z)      =", np.round(solve_reverse(lin, z, 2.0), 6))
print("footprints   :", np.round(hull_interval(step, 2.0), 6), np.round(hull_interval(lin, 2.0), 6))

# capacity: f(z) = z - 2t/z + ..., so both flows have capacity t = 2
for name, d in (("step", step), ("linear", lin)):
    print(f"capacity ({name}):", round(capacity_estimate(lambda zz, d=d: solve_reverse(d, zz, 2.0)), 8))
