"""Elementary slit maps of the upper half-plane and their compositions.

The basic building block is

    r_n(a; z) = a + sqrt((z - a)**2 - 4/n),

which maps the upper half-plane H conformally onto H minus the vertical
segment {Re z = a, 0 <= Im z <= 2/sqrt(n)}.  A discrete Loewner chain
composes these maps with the newest slit innermost::

    D_n(m; z) = r_n(S0; r_n(S1; ... r_n(S_{m-1}; z) ...)).

Every function here accepts Python scalars or numpy arrays and broadcasts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SlitParams",
    "SlitChain",
    "slit_height",
    "eval_slit",
    "eval_slit_time",
    "eval_slit_inverse",
    "eval_chain",
    "chain_inverse_real",
    "invert_chain",
]


@dataclass(frozen=True)
class SlitParams:
    """Center ``a`` and scale ``n`` of a single slit map."""

    a: float
    n: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"scale n must be a positive integer, got {self.n}")

    @property
    def height(self) -> float:
        return slit_height(self.n)


@dataclass
class SlitChain:
    """Scale ``n`` together with the driver samples S(0), ..., S(m-1)."""

    n: int
    drivers: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"scale n must be a positive integer, got {self.n}")
        self.drivers = np.asarray(self.drivers, dtype=float).reshape(-1)
        if not np.all(np.isfinite(self.drivers)):
            raise ValueError("drivers must be finite")

    @property
    def m(self) -> int:
        return len(self.drivers)

    def head(self, m: int) -> "SlitChain":
        """The chain made of the first ``m`` slits."""
        return SlitChain(self.n, self.drivers[:m])

    def reflected(self) -> "SlitChain":
        return SlitChain(self.n, -self.drivers)


def slit_height(n) -> float:
    return 2.0 / np.sqrt(n)


def _closed(z):
    # complex array with -0.0 imaginary parts normalised to +0.0 so that
    # principal square roots of negative reals land on +i
    z = np.array(z, dtype=complex)
    z.imag += 0.0
    return z


def _unwrap(z, like):
    if np.ndim(like) == 0 and np.ndim(z) == 0:
        return complex(z)
    return z


def _slit_sqrt(u, c):
    """sqrt(u**2 - c**2) continuous on the closed upper half-plane."""
    return np.sqrt(_closed(u - c)) * np.sqrt(_closed(u + c))


def eval_slit_time(a, tau, z):
    """Run the reverse Loewner flow with constant driver ``a`` for time ``tau``.

    Equals ``a + sqrt((z - a)**2 - 4*tau)``; the slit has height 2*sqrt(tau).
    """
    z_arr = _closed(z)
    c = 2.0 * np.sqrt(tau)
    out = a + _slit_sqrt(z_arr - a, c)
    return _unwrap(out, z)


def eval_slit(p: SlitParams, z):
    """Evaluate r_n(a; z) on the closed upper half-plane.

    Real points with ``|z - a| <= 2/sqrt(n)`` land on the slit itself.

    >>> eval_slit(SlitParams(0.0, 1), 0.0)
    2j
    """
    return eval_slit_time(p.a, 1.0 / p.n, z)


def eval_slit_inverse(p: SlitParams, w):
    """Inverse of :func:`eval_slit`.

    Computed as ``a + u*sqrt(1 + c**2/u**2)`` with ``u = w - a``; the
    principal branch puts the cut exactly on the segment ``u in i[-c, c]``.
    Points on the slit itself are sent to the right-hand boundary value
    ``a + sqrt(c**2 - Im(w)**2)``.
    """
    w_arr = np.atleast_1d(_closed(w))
    c = slit_height(p.n)
    u = w_arr - p.a
    out = np.empty_like(u)
    on_slit = (u.real == 0.0) & (u.imag <= c)
    reg = ~on_slit
    ur = u[reg]
    out[reg] = p.a + ur * np.sqrt(1.0 + c * c / (ur * ur))
    out[on_slit] = p.a + np.sqrt(np.maximum(c * c - u.imag[on_slit] ** 2, 0.0))
    return _unwrap(out.reshape(np.shape(w)), w)


def eval_chain(c: SlitChain, z):
    """D_n(m; z): apply r_n(S(m-1)) first and r_n(S(0)) last."""
    w = _closed(z)
    tau = 1.0 / c.n
    for a in c.drivers[::-1]:
        w = eval_slit_time(a, tau, w)
        w = _closed(w)
    return _unwrap(w, z)


def chain_inverse_real(c: SlitChain, x):
    """Boundary value of D_n(m; .) at real ``x``.

    The result is a point of the closed half-plane.  It is real unless ``x``
    lies under the footprint of the hull, in which case it sits on one of the
    slits.
    """
    return eval_chain(c, np.asarray(x, dtype=float) if np.ndim(x) else float(x))


def invert_chain(c: SlitChain, w):
    """Inverse map g_n(m) = D_n(m)^{-1}: apply the inverse slits S(0) first."""
    out = _closed(w)
    for a in c.drivers:
        out = _closed(eval_slit_inverse(SlitParams(a, c.n), out))
    return _unwrap(out, w)
