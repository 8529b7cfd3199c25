"""Discrete Loewner evolution driven by random walks.

Submodules
----------
halfplane_maps
    Slit maps of the upper half-plane and their compositions.
driving_walk
    Increment laws and rescaled random-walk drivers.
loewner_solver
    Forward and reverse chordal Loewner flows, hull intervals, capacity.
measure_lab
    Compactly supported measures, Cauchy transforms, Stieltjes inversion,
    monotone convolution and the metrics on maps.
hull_forest
    Tree/branch structure of the hulls generated by a slit chain.
bessel_chain
    The radial chain Y_{m+1} = sqrt((Y_m - X')**2 + 4/kappa).
experiments
    Convergence sweeps, distributional tests and bound sweeps.
cli
    Command-line front end.
"""

__version__ = "0.1.0"

from .errors import ConfigurationError, DomainError, NumericalFailure
from .halfplane_maps import (
    SlitChain,
    SlitParams,
    chain_inverse_real,
    eval_chain,
    eval_slit,
    eval_slit_inverse,
    eval_slit_time,
    invert_chain,
    slit_height,
)
from .driving_walk import (
    IncrementLaw,
    WalkPath,
    interpolate,
    knot_values,
    modulus_of_continuity,
    piecewise_constant,
    sample_walk,
)
from .loewner_solver import (
    DriverFunction,
    FlowResult,
    capacity_estimate,
    continuity_threshold,
    hull_interval,
    perturbation_bound,
    solve_forward,
    solve_reverse,
    solve_reverse_piecewise,
)
from .measure_lab import (
    CompactMeasure,
    SigmaMap,
    SigmaPath,
    cauchy_transform,
    levy_distance,
    monotone_convolve,
    path_distance,
    reciprocal_cauchy,
    rho_metric,
    sigma_distance,
    stieltjes_invert,
)
from .hull_forest import HullForest, branch_trace, build_forest, classify_step, forest_stats
from .bessel_chain import ChainConfig, drift_estimate, recurrence_experiment, simulate_chain

__all__ = [name for name in dir() if not name.startswith("_")]
