"""Compactly supported probability measures and their Cauchy transforms.

Measures are either finite atomic or members of the slit family.  The slit
law with scale n, slit position a and translation s is the measure whose
reciprocal Cauchy transform is r_n(a; z - s) = a + sqrt((z - s - a)**2 - c**2),
c = 2/sqrt(n).  With a = 0 it is the arcsine law centred at s, with density

    1 / (pi * sqrt(c**2 - (x - s)**2)),   |x - s| < c.

For a != 0 it is a deformation of the arcsine law: with v = x - s - a and
w = sqrt(c**2 - v**2) the density on |v| < c is w / (pi * (a**2 + w**2)),
and an atom of mass |a| / sqrt(a**2 + c**2) sits at
s + a - sign(a) * sqrt(a**2 + c**2), where r_n(a; . - s) vanishes.

Conventions: G(z) = int mu(dx)/(z - x), which has negative imaginary part on
the upper half-plane, so the density is recovered as -Im G(x + i0)/pi.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, optimize

from .errors import ConfigurationError, DomainError, NumericalFailure

__all__ = [
    "CompactMeasure",
    "SigmaMap",
    "SigmaPath",
    "levy_distance",
    "rho_metric",
    "cauchy_transform",
    "reciprocal_cauchy",
    "stieltjes_invert",
    "measure_from_reciprocal",
    "monotone_convolve",
    "sigma_distance",
    "path_distance",
    "DEFAULT_HEIGHTS",
]

DEFAULT_HEIGHTS = (1e-2, 5e-3, 2.5e-3)
_WEIGHT_TOL = 1e-12


@dataclass
class CompactMeasure:
    """Atomic measure (``atoms``, ``weights``) or slit family member.

    Use :meth:`atomic`, :meth:`point`, :meth:`arcsine` or :meth:`slit`
    rather than the raw constructor.  ``family`` is ``"arcsine"`` when
    ``center`` is 0 and ``"slit"`` otherwise.
    """

    atoms: np.ndarray = field(default_factory=lambda: np.zeros(0))
    weights: np.ndarray = field(default_factory=lambda: np.zeros(0))
    family: str | None = None
    n: float = 1.0
    shift: float = 0.0
    center: float = 0.0

    def __post_init__(self):
        if self.family is None:
            x = np.asarray(self.atoms, dtype=float).reshape(-1)
            w = np.asarray(self.weights, dtype=float).reshape(-1)
            if x.shape != w.shape or len(x) == 0:
                raise ConfigurationError("atoms and weights must be non-empty and match")
            if np.any(w < 0) or abs(w.sum() - 1.0) > _WEIGHT_TOL:
                raise ConfigurationError("weights must be nonnegative and sum to 1")
            if not np.all(np.isfinite(x)):
                raise ConfigurationError("atoms must be finite")
            order = np.argsort(x, kind="stable")
            x, w = x[order], w[order]
            # merge coincident atoms
            ux, inv = np.unique(x, return_inverse=True)
            uw = np.zeros(len(ux))
            np.add.at(uw, inv, w)
            keep = uw > 0
            self.atoms, self.weights = ux[keep], uw[keep]
        elif self.family in ("arcsine", "slit"):
            if not self.n > 0:
                raise ConfigurationError("scale n must be positive")
            if not (np.isfinite(self.shift) and np.isfinite(self.center)):
                raise ConfigurationError("slit position and shift must be finite")
            self.family = "arcsine" if self.center == 0 else "slit"
        else:
            raise ConfigurationError(f"unknown family {self.family!r}")

    # constructors -------------------------------------------------------
    @classmethod
    def atomic(cls, atoms, weights=None) -> "CompactMeasure":
        atoms = np.atleast_1d(np.asarray(atoms, dtype=float))
        if weights is None:
            weights = np.full(len(atoms), 1.0 / len(atoms))
        return cls(atoms, np.asarray(weights, dtype=float))

    @classmethod
    def point(cls, a: float) -> "CompactMeasure":
        return cls(np.array([float(a)]), np.array([1.0]))

    @classmethod
    def arcsine(cls, n: float = 1.0, shift: float = 0.0) -> "CompactMeasure":
        return cls(family="arcsine", n=float(n), shift=float(shift))

    @classmethod
    def slit(cls, n: float = 1.0, a: float = 0.0, shift: float = 0.0) -> "CompactMeasure":
        """Measure with reciprocal Cauchy transform r_n(a; z - shift)."""
        return cls(family="slit", n=float(n), shift=float(shift), center=float(a))

    # basic properties ---------------------------------------------------
    @property
    def is_atomic(self) -> bool:
        return self.family is None

    @property
    def half_width(self) -> float:
        return 2.0 / np.sqrt(self.n)

    @property
    def edge_atom(self) -> tuple[float, float] | None:
        """(position, mass) of the atom of a deformed arcsine law, if any."""
        a = self.center
        if self.is_atomic or a == 0:
            return None
        b = np.hypot(a, self.half_width)
        return self.shift + a - np.sign(a) * b, abs(a) / b

    @property
    def support(self) -> tuple[float, float]:
        """Convex hull [A, B] of the support."""
        if self.is_atomic:
            return float(self.atoms[0]), float(self.atoms[-1])
        c = self.half_width
        lo, hi = self.shift + self.center - c, self.shift + self.center + c
        atom = self.edge_atom
        if atom is not None:
            lo, hi = min(lo, atom[0]), max(hi, atom[0])
        return float(lo), float(hi)

    @property
    def mean(self) -> float:
        if self.is_atomic:
            return float(np.dot(self.atoms, self.weights))
        return self.shift

    @property
    def variance(self) -> float:
        if self.is_atomic:
            return float(np.dot((self.atoms - self.mean) ** 2, self.weights))
        return self.half_width ** 2 / 2.0

    def _continuous_cdf(self, theta):
        # integral of the density up to v = c sin(theta), see module docstring
        k = abs(self.center) / np.hypot(self.center, self.half_width)
        lifted = np.arctan2(k * np.sin(theta), np.cos(theta))
        return (theta + np.pi / 2 - k * (lifted + np.pi / 2)) / np.pi

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.is_atomic:
            cw = np.concatenate([[0.0], np.cumsum(self.weights)])
            return cw[np.searchsorted(self.atoms, x, side="right")]
        v = np.clip((x - self.shift - self.center) / self.half_width, -1.0, 1.0)
        out = self._continuous_cdf(np.arcsin(v))
        atom = self.edge_atom
        if atom is not None:
            out = out + atom[1] * (x >= atom[0])
        return out

    def quantile(self, p):
        p = np.asarray(p, dtype=float)
        if self.is_atomic:
            cw = np.cumsum(self.weights)
            idx = np.minimum(np.searchsorted(cw, p - 1e-15, side="left"), len(cw) - 1)
            return self.atoms[idx]
        c, base = self.half_width, self.shift + self.center
        atom = self.edge_atom
        if atom is None:
            return base + c * np.sin(np.pi * (p - 0.5))
        # invert the continuous part on a fine angle grid, then splice in the atom
        theta = np.linspace(-np.pi / 2, np.pi / 2, 20001)
        F = self._continuous_cdf(theta)
        x0, m0 = atom
        lower = m0 if x0 < base else 0.0
        out = base + c * np.sin(np.interp(p - lower, F, theta))
        if x0 < base:
            return np.where(p <= m0, x0, out)
        return np.where(p > F[-1], x0, out)

    def to_atoms(self, k: int = 2000) -> "CompactMeasure":
        """Atomic approximation with Levy error at most 1/k.

        Continuous parts become ``k`` equal-mass quantile midpoints; the atom
        of a deformed arcsine law is kept exactly.
        """
        if self.is_atomic:
            return self
        atom = self.edge_atom
        m0 = 0.0 if atom is None else atom[1]
        theta_q = (np.arange(k) + 0.5) / k
        if atom is None:
            return CompactMeasure.atomic(self.quantile(theta_q), np.full(k, 1.0 / k))
        # quantiles of the continuous part alone
        theta = np.linspace(-np.pi / 2, np.pi / 2, 20001)
        F = self._continuous_cdf(theta) / (1.0 - m0)
        xs = self.shift + self.center + self.half_width * np.sin(np.interp(theta_q, F, theta))
        return CompactMeasure.atomic(np.append(xs, atom[0]),
                                     np.append(np.full(k, (1.0 - m0) / k), m0))

    def shifted(self, b: float) -> "CompactMeasure":
        if self.is_atomic:
            return CompactMeasure(self.atoms + b, self.weights.copy())
        return CompactMeasure.slit(self.n, self.center, self.shift + b)

    # serialisation ------------------------------------------------------
    def to_dict(self) -> dict:
        if self.is_atomic:
            return {"atoms": [[float(x), float(w)] for x, w in zip(self.atoms, self.weights)]}
        if self.family == "arcsine":
            return {"family": "arcsine", "n": self.n, "shift": self.shift}
        return {"family": "slit", "n": self.n, "center": self.center, "shift": self.shift}

    @classmethod
    def from_dict(cls, d: dict) -> "CompactMeasure":
        if "atoms" in d:
            pairs = np.asarray(d["atoms"], dtype=float).reshape(-1, 2)
            return cls.atomic(pairs[:, 0], pairs[:, 1])
        if d.get("family") == "arcsine":
            return cls.arcsine(d.get("n", 1.0), d.get("shift", 0.0))
        if d.get("family") == "slit":
            return cls.slit(d.get("n", 1.0), d.get("center", 0.0), d.get("shift", 0.0))
        raise ConfigurationError(f"cannot read measure from {d!r}")

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "CompactMeasure":
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# metrics


def _cdf_dominated(xs, Fx, ys, Gy, delta, eps):
    # F(x) <= G(x + delta) + delta at every atom x of F
    cw = np.concatenate([[0.0], Gy])
    G_at = cw[np.searchsorted(ys, xs + delta + eps, side="right")]
    return bool(np.all(Fx <= G_at + delta + eps))


def levy_distance(mu: CompactMeasure, nu: CompactMeasure, eps: float = 1e-12) -> float:
    """Levy distance between two measures.

    For atomic measures the feasibility of a band width ``delta`` can only
    change at atom-position differences or CDF-level differences, so the
    infimum is found by binary search over that finite candidate set.
    Slit family members are replaced by 2000-atom quantile approximations.
    """
    mu, nu = mu.to_atoms(), nu.to_atoms()
    xs, ys = mu.atoms, nu.atoms
    Fx, Gy = np.cumsum(mu.weights), np.cumsum(nu.weights)

    def feasible(delta):
        return (_cdf_dominated(xs, Fx, ys, Gy, delta, eps)
                and _cdf_dominated(ys, Gy, xs, Fx, delta, eps))

    levels_f = np.concatenate([[0.0], Fx])
    levels_g = np.concatenate([[0.0], Gy])
    cand = np.concatenate([
        np.abs(xs[:, None] - ys[None, :]).ravel(),
        np.abs(levels_f[:, None] - levels_g[None, :]).ravel(),
        [0.0, 1.0],
    ])
    cand = np.unique(cand[(cand >= 0) & (cand <= 1.0)])
    lo, hi = 0, len(cand) - 1
    if feasible(cand[0]):
        return float(cand[0])
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if feasible(cand[mid]):
            hi = mid
        else:
            lo = mid
    return float(cand[hi])


def rho_metric(mu: CompactMeasure, nu: CompactMeasure) -> float:
    """Levy distance plus the largest discrepancy of the support endpoints."""
    (a1, b1), (a2, b2) = mu.support, nu.support
    return levy_distance(mu, nu) + max(abs(a1 - a2), abs(b1 - b2))


# ---------------------------------------------------------------------------
# transforms


def _slit_closed(v, a, c):
    # 1 / (a + sqrt(v^2 - c^2)); the principal root of 1 - c^2/v^2 puts the
    # cut exactly on [-c, c]
    return 1.0 / (a + v * np.sqrt(1.0 - (c * c) / (v * v)))


def _slit_quadrature(v, a, c):
    # density w / (pi (a^2 + w^2)) written against the Gauss-Jacobi weight
    # (c^2 - x^2)^(-1/2); the factor is 1/pi for the arcsine law
    b2 = a * a + c * c
    if a == 0:
        def factor(x):
            return 1.0 / np.pi
    else:
        def factor(x):
            return (c * c - x * x) / (np.pi * (b2 - x * x))
    out = np.empty(v.shape, dtype=complex)
    for i, vi in np.ndenumerate(v):
        def re(x):
            return ((vi - x) / abs(vi - x) ** 2).real * factor(x)

        def im(x):
            return (np.conj(vi - x) / abs(vi - x) ** 2).imag * factor(x)

        kw = dict(weight="alg", wvar=(-0.5, -0.5), limit=200, epsabs=1e-13, epsrel=1e-12)
        out[i] = integrate.quad(re, -c, c, **kw)[0] + 1j * integrate.quad(im, -c, c, **kw)[0]
    return out


def cauchy_transform(mu: CompactMeasure, z, method: str = "auto"):
    """G_mu(z) = int mu(dx) / (z - x).

    Atomic measures are summed exactly.  For the slit family ``method``
    selects the closed form ``1 / r_n(a; z - s)`` (``"auto"``) or adaptive
    Gauss-Jacobi quadrature of the density plus the exact atom term
    (``"quadrature"``).
    """
    z_arr = np.asarray(z, dtype=complex)
    if mu.is_atomic:
        diff = z_arr[..., None] - mu.atoms
        if np.any(diff == 0):
            raise DomainError("Cauchy transform evaluated at an atom")
        out = np.sum(mu.weights / diff, axis=-1)
    else:
        v = z_arr - mu.shift - mu.center
        c, a = mu.half_width, mu.center
        if np.any((v.imag == 0) & (np.abs(v.real) <= c)):
            raise DomainError("Cauchy transform evaluated on the continuous support")
        atom = mu.edge_atom
        if atom is not None and np.any(z_arr == atom[0]):
            raise DomainError("Cauchy transform evaluated at an atom")
        if method == "quadrature":
            out = _slit_quadrature(v, a, c)
            if atom is not None:
                out = out + atom[1] / (z_arr - atom[0])
        elif method == "auto":
            out = _slit_closed(v, a, c)
        else:
            raise ValueError(f"unknown method {method!r}")
    return complex(out) if np.ndim(out) == 0 else out


def reciprocal_cauchy(mu: CompactMeasure, z, method: str = "auto"):
    """f_mu(z) = 1 / G_mu(z); maps the upper half-plane into itself."""
    g = cauchy_transform(mu, z, method)
    return 1.0 / g


# ---------------------------------------------------------------------------
# Stieltjes inversion


def _extrapolate(heights, values):
    """Fit v(y) = v0 + c1 sqrt(y) + c2 y and return v0 (vectorised in values)."""
    y = np.asarray(heights, dtype=float)
    if len(y) == 1:
        return values[0]
    if len(y) == 2:
        basis = np.c_[np.ones(2), y]
    else:
        basis = np.c_[np.ones(len(y)), np.sqrt(y), y]
    coef, *_ = np.linalg.lstsq(basis, np.asarray(values).reshape(len(y), -1), rcond=None)
    out = coef[0]
    return out.reshape(np.shape(values)[1:])


def _grid(lo, hi, y, oversample=16):
    npts = int(np.ceil((hi - lo) / (y / oversample)))
    npts += npts % 2  # odd number of nodes for Simpson
    return np.linspace(lo, hi, npts + 1)


def stieltjes_invert(G: Callable, interval: tuple[float, float],
                     heights: Sequence[float] = DEFAULT_HEIGHTS,
                     failure_tol: float = 5e-2) -> float:
    """Mass of the open interval plus half the endpoint atoms.

    Integrates -Im G(a + iy)/pi over the interval with composite Simpson at
    each height and extrapolates y -> 0 with the model
    v0 + c1 sqrt(y) + c2 y (square-root edges and Poisson tails of atoms
    are both captured).  Raises :class:`NumericalFailure` if the extrapolated
    value disagrees with the finest raw value by more than ``failure_tol``.
    """
    x0, x1 = interval
    if not x0 < x1:
        raise DomainError("interval must satisfy x < x'")
    ys = sorted(heights, reverse=True)
    raw = []
    for y in ys:
        a = _grid(x0, x1, y)
        raw.append(-integrate.simpson(np.asarray(G(a + 1j * y)).imag, x=a) / np.pi)
    raw = np.asarray(raw)
    est = float(_extrapolate(ys, raw))
    if not np.isfinite(est) or abs(est - raw[-1]) > failure_tol:
        raise NumericalFailure(
            f"Stieltjes extrapolation unstable: raw {raw.tolist()} -> {est}")
    return est


def measure_from_reciprocal(f: Callable, bracket: tuple[float, float], bins: int = 400,
                            heights: Sequence[float] = DEFAULT_HEIGHTS,
                            mass_tol: float = 1e-3) -> CompactMeasure:
    """Recover the measure whose reciprocal Cauchy transform is ``f``.

    The cumulative Stieltjes integral is extrapolated to y = 0 at every bin
    edge of a uniform grid on ``bracket``; bin masses become atoms at the bin
    centres.  The raw total must be within ``mass_tol`` of 1.
    """
    lo, hi = bracket
    edges = np.linspace(lo, hi, bins + 1)
    ys = sorted(heights, reverse=True)
    cums = []
    for y in ys:
        a = _grid(lo, hi, y)
        dens = -np.asarray(1.0 / f(a + 1j * y)).imag / np.pi
        cum = integrate.cumulative_simpson(dens, x=a, initial=0.0)
        cums.append(np.interp(edges, a, cum))
    cum0 = _extrapolate(ys, np.asarray(cums))
    total = cum0[-1] - cum0[0]
    if not abs(total - 1.0) <= mass_tol:
        raise NumericalFailure(f"recovered total mass {total:.6f} is not 1 within {mass_tol}")
    # extrapolation misbehaves within ~y of an atom; project onto
    # nondecreasing sequences (least squares) so the damage stays local
    cum0 = np.clip(cum0, cum0[0], cum0[-1])
    cum0 = optimize.isotonic_regression(cum0).x
    masses = np.clip(np.diff(cum0), 0.0, None)
    masses /= masses.sum()
    centres = 0.5 * (edges[:-1] + edges[1:])
    keep = masses > 0
    return CompactMeasure.atomic(centres[keep], masses[keep] / masses[keep].sum())


def monotone_convolve(mu: CompactMeasure, nu: CompactMeasure, bins: int = 400,
                      heights: Sequence[float] = DEFAULT_HEIGHTS) -> CompactMeasure:
    """Monotone convolution: the measure with reciprocal transform f_mu o f_nu.

    When ``nu`` is a point mass the result is ``mu`` translated, which is
    returned exactly.  Otherwise the composition is Stieltjes-inverted on the
    bracket [min(A_nu, A_mu + A_nu), max(B_nu, B_mu + B_nu)], padded so that
    no atom sits on an edge.  Off supp(nu), f_nu is real with
    |f_nu(x)| >= dist(x, [A_nu, B_nu]) and keeps the sign of x - B_nu (or
    x - A_nu), so the composition stays real and nonzero outside it.
    """
    if nu.is_atomic and len(nu.atoms) == 1:
        return mu.shifted(float(nu.atoms[0]))

    def f(z):
        return reciprocal_cauchy(mu, reciprocal_cauchy(nu, z))

    (a1, b1), (a2, b2) = mu.support, nu.support
    lo, hi = min(a2, a1 + a2), max(b2, b1 + b2)
    pad = 0.05 * (hi - lo) + 0.1
    return measure_from_reciprocal(f, (lo - pad, hi + pad), bins, heights)


# ---------------------------------------------------------------------------
# maps and paths


@dataclass
class SigmaMap:
    """A map H -> H together with its univalence interval [A_f, B_f]."""

    func: Callable
    endpoints: tuple[float, float]

    def __call__(self, z):
        return self.func(z)

    @classmethod
    def from_measure(cls, mu: CompactMeasure) -> "SigmaMap":
        return cls(lambda z: reciprocal_cauchy(mu, z), mu.support)

    @classmethod
    def identity(cls) -> "SigmaMap":
        return cls(lambda z: np.asarray(z, dtype=complex), (0.0, 0.0))


@dataclass
class SigmaPath:
    """Map-valued path sampled on an increasing time grid starting at 0."""

    times: np.ndarray
    maps: list

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if len(self.times) != len(self.maps) or len(self.times) == 0:
            raise DomainError("times and maps must have the same non-zero length")
        if self.times[0] != 0 or np.any(np.diff(self.times) <= 0):
            raise DomainError("time grid must start at 0 and increase strictly")


def sigma_distance(f: SigmaMap, g: SigmaMap, a: float = 1.0,
                   half_width: float | None = None, points: int = 401) -> float:
    """Sup of |f - g| on the line Im z = a (|Re z| <= R) plus endpoint gap.

    ``R`` defaults to the largest endpoint magnitude plus 10.
    """
    if a <= 0:
        raise DomainError("a must be positive")
    (af, bf), (ag, bg) = f.endpoints, g.endpoints
    R = half_width if half_width is not None else max(abs(af), abs(bf), abs(ag), abs(bg)) + 10.0
    z = np.linspace(-R, R, points) + 1j * a
    sup = float(np.max(np.abs(np.asarray(f(z)) - np.asarray(g(z)))))
    return sup + max(abs(af - ag), abs(bf - bg))


def path_distance(P: SigmaPath, Q: SigmaPath, a: float = 1.0,
                  terms: int = 30, distances=None) -> float:
    """Truncated series sum_k 2^-k s_k / (1 + s_k), s_k = sup_{t <= k} distance.

    ``terms = 30`` keeps the neglected tail below 1e-9.  Precomputed
    per-time distances may be passed as ``distances``.
    """
    if P.times.shape != Q.times.shape or not np.allclose(P.times, Q.times, rtol=0, atol=1e-12):
        raise DomainError("paths must share a common time grid")
    if distances is None:
        distances = [sigma_distance(f, g, a) for f, g in zip(P.maps, Q.maps)]
    d = np.asarray(distances, dtype=float)
    running = np.maximum.accumulate(d)
    total = 0.0
    for k in range(1, terms + 1):
        idx = np.searchsorted(P.times, k, side="right") - 1
        s = running[idx]
        total += 2.0 ** -k * s / (1.0 + s)
    return float(total)
