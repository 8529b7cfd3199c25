"""Random-walk drivers.

Increments X_1, X_2, ... are i.i.d. with mean 0 and variance kappa.  The
rescaled walk S_n is piecewise linear with knots

    S_n(m/n) = n**-0.5 * (X_1 + ... + X_m),

and the step driver used by the piecewise-constant flow h_n holds the value
of the left knot.

Random numbers come from numpy's counter-based Philox generator; stream
``(seed, replica)`` is independent of how replicas are split across workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DomainError

__all__ = [
    "IncrementLaw",
    "WalkPath",
    "make_rng",
    "sample_increments",
    "sample_walk",
    "interpolate",
    "piecewise_constant",
    "knot_values",
    "modulus_of_continuity",
]

LAW_KINDS = ("bernoulli", "rademacher", "uniform", "gaussian", "atoms", "constant")
_ALIASES = {"rademacher-scaled": "rademacher", "custom-atoms": "atoms", "custom": "atoms"}


@dataclass(frozen=True)
class IncrementLaw:
    """Centered increment distribution with variance ``kappa``.

    ``bernoulli`` and ``rademacher`` both mean +-sqrt(kappa) with probability
    1/2.  ``uniform`` is uniform on [-sqrt(3 kappa), sqrt(3 kappa)].
    ``atoms`` takes explicit ``values``/``weights`` which are checked for mean
    0 and variance kappa.  ``constant`` is the degenerate kappa = 0 law.
    """

    kind: str = "bernoulli"
    kappa: float = 1.0
    values: tuple = ()
    weights: tuple = ()

    def __post_init__(self):
        kind = _ALIASES.get(self.kind, self.kind)
        object.__setattr__(self, "kind", kind)
        if kind not in LAW_KINDS:
            raise ConfigurationError(f"unknown increment law {self.kind!r}")
        if kind == "constant":
            if self.kappa != 0:
                raise ConfigurationError("the constant law has kappa = 0")
            return
        if not np.isfinite(self.kappa) or self.kappa <= 0:
            raise ConfigurationError(f"kappa must be positive, got {self.kappa}")
        if kind == "atoms":
            v = np.asarray(self.values, dtype=float)
            w = np.asarray(self.weights, dtype=float)
            if v.ndim != 1 or v.shape != w.shape or len(v) == 0:
                raise ConfigurationError("atoms law needs matching values and weights")
            if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
                raise ConfigurationError("atom weights must be nonnegative and sum to 1")
            mean = float(np.dot(v, w))
            var = float(np.dot(v * v, w))
            if abs(mean) > 1e-12 or abs(var - self.kappa) > 1e-12:
                raise ConfigurationError(
                    f"atoms law has mean {mean:.3g} and variance {var:.6g}, "
                    f"expected 0 and {self.kappa}"
                )
            object.__setattr__(self, "values", tuple(v))
            object.__setattr__(self, "weights", tuple(w))

    @property
    def symmetric(self) -> bool:
        if self.kind != "atoms":
            return True
        v = np.asarray(self.values)
        w = np.asarray(self.weights)
        order = np.argsort(v)
        rev = np.argsort(-v)
        return bool(np.allclose(v[order], -v[rev], atol=1e-12)
                    and np.allclose(w[order], w[rev], atol=1e-12))

    def scaled(self, factor: float) -> "IncrementLaw":
        """Law of ``factor * X``."""
        if self.kind == "atoms":
            return IncrementLaw("atoms", self.kappa * factor**2,
                                tuple(np.asarray(self.values) * factor), self.weights)
        if self.kind == "constant":
            return self
        return IncrementLaw(self.kind, self.kappa * factor**2)

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        k = self.kind
        if k == "constant":
            return np.zeros(size)
        s = np.sqrt(self.kappa)
        if k in ("bernoulli", "rademacher"):
            return s * (2.0 * rng.integers(0, 2, size=size) - 1.0)
        if k == "uniform":
            r = np.sqrt(3.0) * s
            return rng.uniform(-r, r, size=size)
        if k == "gaussian":
            return s * rng.standard_normal(size)
        idx = rng.choice(len(self.values), size=size, p=np.asarray(self.weights))
        return np.asarray(self.values)[idx]

    @classmethod
    def from_dict(cls, d: dict) -> "IncrementLaw":
        d = dict(d)
        return cls(d.pop("kind", "bernoulli"), float(d.pop("kappa", 1.0)),
                   tuple(d.pop("values", ())), tuple(d.pop("weights", ())))

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "kappa": self.kappa}
        if self.kind == "atoms":
            d["values"] = list(self.values)
            d["weights"] = list(self.weights)
        return d


def make_rng(seed: int, replica: int | None = None) -> np.random.Generator:
    """Philox generator for stream ``seed`` (and sub-stream ``replica``)."""
    key = [int(seed)] if replica is None else [int(seed), int(replica)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(key)))


@dataclass
class WalkPath:
    """Increments X_1..X_m of a walk viewed at scale ``n``."""

    n: int
    increments: np.ndarray = field(default_factory=lambda: np.zeros(0))
    seed: int | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ConfigurationError(f"scale n must be >= 1, got {self.n}")
        self.increments = np.asarray(self.increments, dtype=float).reshape(-1)

    @property
    def m(self) -> int:
        return len(self.increments)

    @property
    def horizon(self) -> float:
        return self.m / self.n

    @property
    def knots(self) -> np.ndarray:
        return knot_values(self)


def sample_increments(law: IncrementLaw, m: int, seed: int, replica: int | None = None):
    if m < 0:
        raise ConfigurationError(f"step count must be >= 0, got {m}")
    return law.sample(make_rng(seed, replica), m)


def sample_walk(law: IncrementLaw, m: int, seed: int, n: int = 1,
                replica: int | None = None) -> WalkPath:
    """Draw ``m`` i.i.d. increments; the same seed always gives the same path."""
    return WalkPath(n, sample_increments(law, m, seed, replica), seed)


def knot_values(w: WalkPath) -> np.ndarray:
    """S_n(k/n) for k = 0..m."""
    out = np.zeros(w.m + 1)
    np.cumsum(w.increments, out=out[1:])
    return out / np.sqrt(w.n)


def _check_time(w: WalkPath, t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(t > w.horizon * (1 + 1e-12) + 1e-15):
        raise DomainError(f"time outside [0, {w.horizon}]")
    return t


def interpolate(w: WalkPath, t):
    """Piecewise-linear walk S_n(t)."""
    t = _check_time(w, t)
    knots = knot_values(w)
    grid = np.arange(w.m + 1) / w.n
    out = np.interp(t, grid, knots)
    return float(out) if out.ndim == 0 else out


def piecewise_constant(w: WalkPath, t):
    """Step driver holding S_n(k/n) on [k/n, (k+1)/n)."""
    t = _check_time(w, t)
    knots = knot_values(w)
    k = np.minimum(np.floor(t * w.n + 1e-9).astype(int), w.m)
    out = knots[k]
    return float(out) if out.ndim == 0 else out


def modulus_of_continuity(w: WalkPath, t: float) -> float:
    """sup |S_n(r) - S_n(s)| over 0 <= s < r <= t with r - s <= 1/n.

    For a piecewise-linear path this is the largest single-piece increment.
    """
    _check_time(w, t)
    full = int(np.floor(t * w.n + 1e-9))
    inc = np.abs(w.increments[:full]) / np.sqrt(w.n)
    best = float(inc.max()) if full else 0.0
    frac = t * w.n - full
    if full < w.m and frac > 1e-12:
        best = max(best, abs(w.increments[full]) / np.sqrt(w.n) * frac)
    return best
