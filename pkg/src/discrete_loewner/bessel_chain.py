"""The real-axis Markov chain attached to a discrete Loewner evolution.

Pushing a real point through the inverse maps and recentring at the driver
gives, at scale n = 1,

    Y_m = sqrt((Y_{m-1} - X'_m)**2 + 4/kappa),     X'_m = X_m / sqrt(kappa),

a discrete analogue of a Bessel process of dimension 1 + 4/kappa: for large
y the drift is 2/(kappa y) and the step variance tends to 1.  It is transient
for kappa < 4 and recurrent for kappa > 4.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .driving_walk import IncrementLaw, make_rng
from .errors import ConfigurationError

__all__ = [
    "ChainConfig",
    "chain_step",
    "simulate_chain",
    "simulate_replicas",
    "drift_estimate",
    "recurrence_experiment",
]


@dataclass
class ChainConfig:
    """Parameters of a Y-chain run; ``law`` must have variance 1."""

    kappa: float
    law: IncrementLaw = field(default_factory=lambda: IncrementLaw("rademacher", 1.0))
    y0: float = 1.0
    horizon: int = 100
    seed: int = 0

    def __post_init__(self):
        if not (np.isfinite(self.kappa) and self.kappa > 0):
            raise ConfigurationError(f"kappa must be positive, got {self.kappa}")
        if self.law.kind == "constant" or abs(self.law.kappa - 1.0) > 1e-12:
            raise ConfigurationError("the X' law must be centred with variance 1")
        if self.y0 == 0 or not np.isfinite(self.y0):
            raise ConfigurationError("y0 must be a nonzero real")
        if self.horizon < 0:
            raise ConfigurationError("horizon must be >= 0")

    @property
    def floor(self) -> float:
        return 2.0 / np.sqrt(self.kappa)


def chain_step(y, x_prime, kappa):
    """One transition sqrt((y - x')**2 + 4/kappa)."""
    d = np.subtract(y, x_prime)
    return np.sqrt(d * d + 4.0 / kappa)


def simulate_chain(cfg: ChainConfig, replica: int | None = None):
    """Trajectory Y_0..Y_M and the driving increments X'_1..X'_M."""
    xs = cfg.law.sample(make_rng(cfg.seed, replica), cfg.horizon)
    y = np.empty(cfg.horizon + 1)
    y[0] = cfg.y0
    c = 4.0 / cfg.kappa
    for m in range(cfg.horizon):
        d = y[m] - xs[m]
        y[m + 1] = np.sqrt(d * d + c)
    return y, xs


def simulate_replicas(cfg: ChainConfig, replicas: int, record: bool = False,
                      chunk: int = 4096):
    """Advance ``replicas`` independent chains in lockstep.

    Replica r draws its increments from stream (seed, r) in blocks of
    ``chunk`` steps, so results do not depend on how replicas are batched.
    Returns the full (replicas, M+1) trajectory array when ``record`` is set,
    otherwise just the final states.
    """
    rngs = [make_rng(cfg.seed, r) for r in range(replicas)]
    y = np.full(replicas, float(cfg.y0))
    traj = np.empty((replicas, cfg.horizon + 1)) if record else None
    if record:
        traj[:, 0] = y
    c = 4.0 / cfg.kappa
    done = 0
    while done < cfg.horizon:
        k = min(chunk, cfg.horizon - done)
        xs = np.stack([cfg.law.sample(g, k) for g in rngs])
        for j in range(k):
            d = y - xs[:, j]
            y = np.sqrt(d * d + c)
            if record:
                traj[:, done + j + 1] = y
        done += k
    return traj if record else y


def drift_estimate(y: float, kappa: float, law: IncrementLaw, samples: int, seed: int) -> dict:
    """Monte Carlo estimates of 2y E[Y_1 - y] and E[(Y_1 - y)**2] from Y_0 = y.

    The increment is computed as (x'^2 - 2 y x' + 4/kappa) / (Y_1 + y) to
    avoid cancellation at large y.
    """
    if abs(law.kappa - 1.0) > 1e-12:
        raise ConfigurationError("the X' law must have variance 1")
    x = law.sample(make_rng(seed), samples)
    y1 = chain_step(y, x, kappa)
    dy = (x * x - 2.0 * y * x + 4.0 / kappa) / (y1 + y)
    scaled = 2.0 * y * dy
    sq = dy * dy
    root_n = np.sqrt(samples)
    return {
        "scaled_drift": float(scaled.mean()),
        "scaled_drift_se": float(scaled.std(ddof=1) / root_n),
        "second_moment": float(sq.mean()),
        "second_moment_se": float(sq.std(ddof=1) / root_n),
        "limit_drift": 4.0 / kappa,
    }


def recurrence_experiment(cfg: ChainConfig, level: float | None = None,
                          replicas: int = 1000, chunk: int = 4096) -> dict:
    """Fraction of replicas that climb above 2*level and later drop below level.

    ``level`` defaults to 5 times the chain's floor 2/sqrt(kappa).  The
    reported interval is the 95% Wilson score interval.
    """
    level = 5.0 * cfg.floor if level is None else float(level)
    if level <= cfg.floor:
        raise ConfigurationError("level must exceed the floor 2/sqrt(kappa)")
    rngs = [make_rng(cfg.seed, r) for r in range(replicas)]
    y = np.full(replicas, float(cfg.y0))
    climbed = y > 2.0 * level
    returned = np.zeros(replicas, dtype=bool)
    c = 4.0 / cfg.kappa
    done = 0
    while done < cfg.horizon:
        k = min(chunk, cfg.horizon - done)
        xs = np.stack([cfg.law.sample(g, k) for g in rngs])
        for j in range(k):
            d = y - xs[:, j]
            y = np.sqrt(d * d + c)
            returned |= climbed & (y < level)
            climbed |= y > 2.0 * level
        done += k
    p = returned.mean() if replicas else 0.0
    z = 1.959963984540054
    denom = 1 + z * z / replicas
    centre = (p + z * z / (2 * replicas)) / denom
    half = z * np.sqrt(p * (1 - p) / replicas + z * z / (4 * replicas**2)) / denom
    return {
        "kappa": cfg.kappa,
        "level": level,
        "horizon": cfg.horizon,
        "replicas": replicas,
        "return_fraction": float(p),
        "ci95": [float(centre - half), float(centre + half)],
        "climbed_fraction": float(climbed.mean()),
    }
