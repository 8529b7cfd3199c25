"""Chordal Loewner flows driven by a real function psi.

Forward flow (hull grows, points get swallowed)::

    d/dt g(t; z) = 2 / (g(t; z) - psi(t)),          g(0; z) = z

Reverse flow, whose time-t value is the inverse map f(t) = g(t)^{-1}::

    d/ds h(s; z) = -2 / (h(s; z) - psi(t - s)),     h(0; z) = z

Continuous drivers are integrated with an embedded Dormand-Prince 5(4) pair
whose step is additionally capped by ``STEP_FRACTION * |g - psi|**2``; the
vector field has Lipschitz constant 2/|g - psi|**2, so this keeps the
scheme stable right up to a collision.  Step drivers are never integrated:
on each constant piece the flow is a closed-form slit map.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .driving_walk import WalkPath, knot_values
from .halfplane_maps import eval_slit_time

__all__ = [
    "DriverFunction",
    "FlowResult",
    "solve_forward",
    "flow_forward",
    "solve_reverse",
    "solve_reverse_piecewise",
    "hull_interval",
    "capacity_estimate",
    "continuity_threshold",
    "perturbation_bound",
]

STEP_FRACTION = 0.1
DEFAULT_TOL = 1e-10
MULTISECTION = 15

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200,
                187 / 2100, 1 / 40])
_E = _B5 - _B4


@dataclass
class DriverFunction:
    """Real driving function on [0, horizon].

    ``kind`` is ``"constant"``, ``"linear"`` (walk interpolation),
    ``"step"`` (left-constant walk sampling) or ``"general"``.  ``breakpoints``
    lists times where the driver is not smooth; the integrator never steps
    across them.
    """

    func: Callable
    horizon: float = np.inf
    kind: str = "general"
    breakpoints: np.ndarray = field(default_factory=lambda: np.zeros(0))
    walk: WalkPath | None = None
    value: float = 0.0

    def __call__(self, t):
        return self.func(t)

    @classmethod
    def constant(cls, a: float, horizon: float = np.inf) -> "DriverFunction":
        a = float(a)
        return cls(lambda t: a + 0.0 * np.asarray(t, dtype=float), horizon, "constant", value=a)

    @classmethod
    def from_walk(cls, w: WalkPath, mode: str = "linear") -> "DriverFunction":
        knots = knot_values(w)
        grid = np.arange(w.m + 1) / w.n
        if not np.any(knots):
            # a walk that never moves drives both flows by the constant 0
            return cls.constant(0.0, w.horizon)
        if mode == "linear":
            return cls(lambda t: np.interp(t, grid, knots), w.horizon, "linear", grid, w)
        if mode in ("step", "piecewise"):
            def step(t):
                k = np.clip(np.floor(np.asarray(t) * w.n + 1e-9).astype(int), 0, w.m)
                return knots[k]
            return cls(step, w.horizon, "step", grid, w)
        raise ValueError(f"unknown walk driver mode {mode!r}")

    @classmethod
    def from_samples(cls, times, values) -> "DriverFunction":
        """Piecewise-linear driver through ``(times, values)``."""
        times = np.asarray(times, dtype=float)
        values = np.asarray(values, dtype=float)
        return cls(lambda t: np.interp(t, times, values), float(times[-1]), "linear", times)

    def range_on(self, t: float) -> tuple[float, float]:
        """(min, max) of the driver over [0, t]."""
        if self.kind == "constant":
            return self.value, self.value
        pts = np.concatenate([[0.0, t], self.breakpoints[self.breakpoints <= t]])
        if self.kind == "general":
            pts = np.concatenate([pts, np.linspace(0.0, t, 2049)])
        vals = np.asarray(self.func(pts), dtype=float)
        return float(vals.min()), float(vals.max())

    def step_pieces(self, t: float, s: float | None = None):
        """Constant pieces of a step driver met by the reverse flow.

        Adjacent pieces with equal values are merged.  Returns ``(values, durations)`` in the order the reverse flow meets
        them: starting at driver time ``t`` and going back to ``t - s``.
        """
        if self.kind == "constant":
            s = t if s is None else s
            return np.array([self.value]), np.array([s])
        if self.kind != "step":
            raise ValueError("step_pieces needs a step or constant driver")
        s = t if s is None else s
        w = self.walk
        knots = knot_values(w)
        lo = t - s
        values, durations = [], []
        u = t
        while u > lo + 1e-15:
            k = int(np.floor(u * w.n + 1e-9))
            left = k / w.n
            if left >= u - 1e-12:
                k -= 1
                left = k / w.n
            k = min(k, w.m)
            start = max(left, lo)
            if values and values[-1] == knots[k]:
                # equal neighbours compose to one slit (flow property)
                durations[-1] += u - start
            else:
                values.append(knots[k])
                durations.append(u - start)
            u = start
        return np.array(values), np.array(durations)


@dataclass
class FlowResult:
    value: complex
    status: str
    swallow_time: float | None = None

    @property
    def alive(self) -> bool:
        return self.status == "alive"


def _segments(T, breaks):
    inner = np.unique(breaks[(breaks > 0) & (breaks < T)])
    return np.concatenate([[0.0], inner, [T]])


def _integrate(y0, T, drv, sign, tol, breaks):
    """Integrate y' = sign * 2 / (y - drv(s)) for s in [0, T].

    Returns final values, a collision mask, and collision times (nan where
    no collision).  A point collides once |y - drv|**2 <= 4 tol; the
    remaining time to impact is then |y - drv|**2 / 4 up to O(tol).
    """
    y = np.array(y0, dtype=complex).reshape(-1)
    hit = np.zeros(y.shape, dtype=bool)
    t_hit = np.full(y.shape, np.nan)
    if T <= 0:
        return y, hit, t_hit
    thresh = 4.0 * tol
    atol = tol
    rtol = tol

    def f(s, v):
        return sign * 2.0 / (v - drv(s))

    # immediate collisions
    d2 = np.abs(y - drv(0.0)) ** 2
    now = d2 <= thresh
    hit[now] = True
    t_hit[now] = d2[now] / 4.0

    seg = _segments(T, breaks)
    h = None
    for s0, s1 in zip(seg[:-1], seg[1:]):
        s = s0
        while s < s1 - 1e-15 * max(1.0, s1):
            act = ~hit
            if not act.any():
                return y, hit, t_hit
            ya = y[act]
            dist2 = np.abs(ya - drv(s)) ** 2
            cap = STEP_FRACTION * dist2.min()
            if h is None:
                h = cap
            h = min(h, cap, s1 - s)
            k = [f(s, ya)]
            for i in range(1, 7):
                yi = ya + h * sum(a * kk for a, kk in zip(_A[i], k))
                k.append(f(s + _C[i] * h, yi))
            y5 = ya + h * sum(b * kk for b, kk in zip(_B5, k) if b != 0.0)
            err = h * sum(e * kk for e, kk in zip(_E, k))
            scale = atol + rtol * np.maximum(np.abs(ya), np.abs(y5))
            enorm = float(np.max(np.abs(err) / scale))
            if enorm <= 1.0 or h <= 1e-14 * max(1.0, s):
                s = s + h
                if sign < 0:
                    # the reverse flow only increases Im
                    y5 = y5.real + 1j * np.maximum(y5.imag, ya.imag)
                y[act] = y5
                d2 = np.abs(y5 - drv(s)) ** 2
                newly = d2 <= thresh
                if newly.any():
                    idx = np.flatnonzero(act)[newly]
                    hit[idx] = True
                    t_hit[idx] = s + d2[newly] / 4.0
                fac = 5.0 if enorm == 0 else min(5.0, 0.9 * enorm ** -0.2)
                h = h * max(fac, 0.2)
            else:
                h = h * max(0.2, 0.9 * enorm ** -0.25)
    return y, hit, t_hit


def flow_forward(d: DriverFunction, z, t: float, tol: float = DEFAULT_TOL):
    """Vectorised forward flow: returns (values, swallowed mask, swallow times)."""
    z = np.asarray(z, dtype=complex)
    y, hit, t_hit = _integrate(z, t, d, 1.0, tol, d.breakpoints)
    return y.reshape(z.shape), hit.reshape(z.shape), t_hit.reshape(z.shape)


def solve_forward(d: DriverFunction, z, t: float, tol: float = DEFAULT_TOL) -> FlowResult:
    """Forward Loewner flow g(t; z) with swallow detection.

    >>> r = solve_forward(DriverFunction.constant(0.0), 2j, 2.0)
    >>> r.status, round(r.swallow_time, 6)
    ('swallowed', 1.0)
    """
    if t > d.horizon * (1 + 1e-12):
        raise ValueError("t beyond the driver horizon")
    y, hit, t_hit = flow_forward(d, np.array([z]), t, tol)
    if hit[0]:
        return FlowResult(complex(y[0]), "swallowed", float(min(t_hit[0], t)))
    return FlowResult(complex(y[0]), "alive", None)


def solve_reverse(d: DriverFunction, z, t: float, tol: float = DEFAULT_TOL,
                  s: float | None = None, return_hits: bool = False):
    """Reverse flow h(s; z) with driver psi(t - s); ``s`` defaults to ``t``.

    At ``s = t`` this is the inverse Loewner map f(t; z).  Step and constant
    drivers use exact slit composition.  Real starting points may collide
    with the driver; pass ``return_hits=True`` to receive the collision mask.
    """
    if t > d.horizon * (1 + 1e-12):
        raise ValueError("t beyond the driver horizon")
    s = t if s is None else s
    z_arr = np.asarray(z, dtype=complex)
    if d.kind in ("step", "constant"):
        values, durations = d.step_pieces(t, s)
        out = z_arr
        for a, tau in zip(values, durations):
            out = eval_slit_time(a, tau, out)
        out = np.asarray(out, dtype=complex)
        if return_hits:
            return out, _step_hits(values, durations, z_arr)
        return complex(out) if out.ndim == 0 else out
    breaks = t - d.breakpoints
    y, hit, _ = _integrate(z_arr, s, lambda u: d(t - u), -1.0, tol, breaks)
    y = y.reshape(z_arr.shape)
    if return_hits:
        return y, hit.reshape(z_arr.shape)
    return complex(y) if y.ndim == 0 else y


def _step_hits(values, durations, z):
    x = np.asarray(z, dtype=complex)
    hit = np.zeros(x.shape, dtype=bool)
    cur = x.copy()
    for a, tau in zip(values, durations):
        real = np.abs(cur.imag) == 0
        hit |= real & (np.abs(cur.real - a) <= 2.0 * np.sqrt(tau))
        cur = np.asarray(eval_slit_time(a, tau, cur), dtype=complex)
    return hit


def solve_reverse_piecewise(w: WalkPath, z, t: float):
    """h_n(t; z) for the step driver of walk ``w``, by exact slit composition.

    At ``t = m/n`` this equals the chain D_n(m; z) with drivers S(0..m-1).
    """
    return solve_reverse(DriverFunction.from_walk(w, "step"), z, t)


def _gfun(r, b):
    """Time for |q| to fall from r to 0 on a piece with slope b = sign(q) v.

    Solves r' = (b r - 2) / r exactly; equals r**2/4 + b r**3/12 + ...
    Only meaningful for b r < 2.
    """
    x = 0.5 * b * r
    small = np.abs(x) < 1e-3
    out = np.empty_like(r)
    xs = x[small]
    out[small] = 0.25 * r[small] ** 2 * (1 + 4 * xs / 3 + 2 * xs * xs + 2.4 * xs ** 3)
    xb, bb = x[~small], b[~small]
    out[~small] = (2.0 / (bb * bb)) * (-np.log1p(-xb) - xb)
    return out


def _ffun(r, b):
    # antiderivative of r / (b r - 2) for b r > 2 (escaping branch)
    return r / b + (2.0 / (b * b)) * np.log(b * r - 2.0)


def _real_flow_linear(times, values, t, x):
    """Exact reverse flow of real points under a piecewise-linear driver.

    Returns (final values, collision mask).  With q = h - psi(t - s) the
    square q**2 evolves smoothly, so collisions are regular zero crossings.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    psi_t = np.interp(t, times, values)
    q = x - psi_t
    hit = q == 0.0
    inner = times[(times > 0) & (times < t)]
    u = np.concatenate([[t], inner[::-1], [0.0]])
    for u_hi, u_lo in zip(u[:-1], u[1:]):
        dur = u_hi - u_lo
        if dur <= 0:
            continue
        v = (np.interp(u_hi, times, values) - np.interp(u_lo, times, values)) / dur
        act = ~hit
        qa = q[act]
        sig = np.sign(qa)
        r0 = np.abs(qa)
        b = sig * v
        r1 = r0.copy()
        falling = b * r0 < 2.0
        hit_here = np.zeros(len(qa), dtype=bool)
        if falling.any():
            rf, bf = r0[falling], b[falling]
            g0 = _gfun(rf, bf)
            coll = g0 <= dur
            target = g0 - dur
            # G is convex increasing, so Newton from r = rf decreases monotonically
            r = rf.copy()
            live = ~coll
            for _ in range(100):
                if not live.any():
                    break
                step = (_gfun(r[live], bf[live]) - target[live]) * (2.0 - bf[live] * r[live]) / r[live]
                r[live] = np.maximum(r[live] - step, 0.5 * r[live])
                live[live] = np.abs(step) > 1e-15 * np.maximum(r[live], 1e-300)
            lo = hi = r
            rnew = np.where(coll, 0.0, 0.5 * (lo + hi))
            r1[falling] = rnew
            hit_here[falling] = coll
        rising = ~falling
        if rising.any():
            rr, br = r0[rising], b[rising]
            eq = br * rr == 2.0
            target = _ffun(np.where(eq, rr * (1 + 1e-12), rr), br) + dur
            # F is concave increasing, so Newton from r = rr increases monotonically
            r = np.where(eq, rr, rr * (1 + 1e-12))
            live = ~eq
            for _ in range(100):
                if not live.any():
                    break
                rl, bl = r[live], br[live]
                step = (target[live] - _ffun(rl, bl)) * (bl * rl - 2.0) / rl
                r[live] = rl + step
                live[live] = np.abs(step) > 1e-15 * rl
            lo = hi = r
            r1[rising] = np.where(eq, rr, 0.5 * (lo + hi))
        q[act] = sig * r1
        idx = np.flatnonzero(act)
        hit[idx[hit_here]] = True
    return q + values[0], hit


def _real_inverse(a, tau, x, right):
    # preimage of real x under the time-tau slit map; on the base point
    # itself pick the right (or left) boundary value
    c = 2.0 * np.sqrt(tau)
    dx = x - a
    sgn = np.where(dx > 0, 1.0, np.where(dx < 0, -1.0, 1.0 if right else -1.0))
    return a + sgn * np.sqrt(dx * dx + c * c)


def _step_hull_interval(values, durations):
    lo, hi = np.inf, -np.inf
    for j in range(len(values)):
        c = 2.0 * np.sqrt(durations[j])
        r = values[j] + c
        l = values[j] - c
        for i in range(j - 1, -1, -1):
            r = _real_inverse(values[i], durations[i], r, True)
            l = _real_inverse(values[i], durations[i], l, False)
        lo, hi = min(lo, l), max(hi, r)
    return float(lo), float(hi)


def hull_interval(d: DriverFunction, t: float, tol: float = 1e-9) -> tuple[float, float]:
    """Real footprint [A, B] of the hull at time ``t``.

    A real point ``x`` belongs to the footprint when the reverse flow started
    at ``x`` runs into the driver before time ``t``.  Beyond the driver's
    range that set is an interval, so each endpoint is found by bisection
    between ``psi(t)`` (always absorbed) and a bracket of width
    ``2 sqrt(t) + 1``.  Step drivers are handled exactly.
    """
    if t <= 0:
        v = float(d(0.0))
        return v, v
    if d.kind in ("step", "constant"):
        return _step_hull_interval(*d.step_pieces(t))
    lo_psi, hi_psi = d.range_on(t)
    start = float(d(t))
    pad = 2.0 * np.sqrt(t) + 1.0

    def absorbed(x):
        x = np.asarray(x, dtype=float)
        if d.kind == "linear":
            times = d.breakpoints
            return _real_flow_linear(times, np.asarray(d(times), dtype=float), t, x)[1]
        _, hit = solve_reverse(d, x + 0j, t, tol=tol, return_hits=True)
        return hit

    first = absorbed([lo_psi, hi_psi])
    # each bracket is (absorbed end, free end)
    left = [lo_psi if first[0] else start, lo_psi - pad]
    right = [hi_psi if first[1] else start, hi_psi + pad]
    k = MULTISECTION
    frac = np.arange(1, k + 1) / (k + 1)
    while max(abs(left[1] - left[0]), abs(right[1] - right[0])) > tol:
        xl = left[0] + frac * (left[1] - left[0])
        xr = right[0] + frac * (right[1] - right[0])
        hit = absorbed(np.concatenate([xl, xr]))
        for br, xs, hs in ((left, xl, hit[:k]), (right, xr, hit[k:])):
            # last absorbed point walking outward; the footprint is convex here
            free = np.flatnonzero(~hs)
            j = free[0] if len(free) else k
            new_in = xs[j - 1] if j > 0 else br[0]
            new_out = xs[j] if j < k else br[1]
            br[0], br[1] = new_in, new_out
    return 0.5 * (left[0] + left[1]), 0.5 * (right[0] + right[1])


def capacity_estimate(f: Callable, R: float = 1e3, points: int = 64) -> float:
    """Half-plane capacity t of a normalised map f(z) = z - 2t/z + O(z**-2).

    Samples f on the upper half of |z| = R.  By Schwarz reflection these
    samples plus their conjugates form a uniform grid on the full circle, on
    which the mean of (f(z) - z) z picks out the 1/z coefficient exactly
    (up to aliasing of order ``points``).
    """
    theta = np.pi * (np.arange(points) + 0.5) / points
    z = R * np.exp(1j * theta)
    w = np.asarray(f(z), dtype=complex)
    coef = np.mean(((w - z) * z).real)
    return float(-coef / 2.0)


def continuity_threshold(delta: float, t: float) -> float:
    """Largest sup|psi - phi| allowed for hull footprints within ``delta``."""
    expo = 9.0 * t / (2.0 * delta * delta)
    denom = np.expm1(expo) if expo < 700 else np.inf
    return float(min(delta / 3.0, (2.0 / 3.0) * delta / denom))


def perturbation_bound(n: float, t: float, sup_diff: float) -> float:
    """(exp(2 n^2 t) - 1) * sup|psi - phi|, valid on Im z >= 1/n."""
    return float(np.expm1(2.0 * n * n * t) * sup_diff)
