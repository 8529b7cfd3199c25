"""Experiment harness tying walks, flows, hulls and measures together.

Every experiment is deterministic given its seed: replica ``r`` always draws
from Philox stream ``(seed, r)`` and results are collected in replica order,
whatever the number of worker threads.
"""

from __future__ import annotations

import os
import warnings
from collections.abc import Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .driving_walk import IncrementLaw, WalkPath, knot_values, modulus_of_continuity, sample_walk
from .errors import ConfigurationError
from .halfplane_maps import SlitChain, eval_chain, slit_height
from .loewner_solver import (
    DriverFunction,
    capacity_estimate,
    continuity_threshold,
    hull_interval,
    perturbation_bound,
    solve_reverse,
)
from .measure_lab import SigmaMap, SigmaPath, path_distance, sigma_distance

__all__ = [
    "default_workers",
    "chain_from_walk",
    "chain_summaries",
    "convergence_sweep",
    "trend_test",
    "stationarity_test",
    "reflection_test",
    "random_driver_pairs",
    "continuity_bound_sweep",
    "perturbation_sweep",
]


def default_workers() -> int:
    env = os.environ.get("DLE_THREADS")
    if env:
        return max(1, int(env))
    return 1


def _pmap(func, items, workers=None):
    workers = default_workers() if workers is None else workers
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(func, items))


def chain_from_walk(w: WalkPath, m: int | None = None) -> SlitChain:
    """Chain D_n(m) with drivers S_n(0), ..., S_n((m-1)/n)."""
    m = w.m + 1 if m is None else m
    return SlitChain(w.n, knot_values(w)[:m])


def _chain_hull(c: SlitChain) -> tuple[float, float]:
    """Exact footprint of the hull generated by chain ``c``."""
    if c.m == 0:
        return 0.0, 0.0
    # step driver with the same values, recentred to start at 0
    steps = np.concatenate([np.diff(c.drivers), [0.0]]) * np.sqrt(c.n)
    d = DriverFunction.from_walk(WalkPath(c.n, steps), "step")
    lo, hi = hull_interval(d, c.m / c.n)
    return lo + c.drivers[0], hi + c.drivers[0]


def chain_summaries(c: SlitChain) -> dict:
    """Scalar summaries of a chain map: capacity, footprint width, last tip."""
    if c.m == 0:
        return {"capacity": 0.0, "width": 0.0, "tip_re": 0.0, "tip_im": 0.0}
    lo, hi = _chain_hull(c)
    tip = complex(eval_chain(c.head(c.m - 1), complex(c.drivers[-1], slit_height(c.n))))
    return {
        "capacity": capacity_estimate(lambda z: eval_chain(c, z)),
        "width": hi - lo,
        "lo": lo,
        "hi": hi,
        "tip_re": tip.real,
        "tip_im": tip.imag,
    }


# ---------------------------------------------------------------------------
# discrete versus continuous


def _map_pair(w: WalkPath, tj: float, a: float, points: int, half_width: float):
    """Piecewise and continuous inverse maps at time tj, plus their distance data."""
    step = DriverFunction.from_walk(w, "step")
    lin = DriverFunction.from_walk(w, "linear")
    z = np.linspace(-half_width, half_width, points) + 1j * a
    if tj == 0:
        ident = SigmaMap.identity()
        return ident, ident, 0.0, 0.0
    fn = solve_reverse(step, z, tj)
    f = solve_reverse(lin, z, tj)
    ends_n = hull_interval(step, tj)
    ends = hull_interval(lin, tj)
    sup = float(np.max(np.abs(fn - f)))
    gap = max(abs(ends_n[0] - ends[0]), abs(ends_n[1] - ends[1]))
    P = SigmaMap(lambda zz, d=step: solve_reverse(d, zz, tj), ends_n)
    Q = SigmaMap(lambda zz, d=lin: solve_reverse(d, zz, tj), ends)
    return P, Q, sup, sup + gap


def convergence_sweep(law: IncrementLaw, t: float, n_list, seed: int,
                      times=None, N: int = 2, points: int = 201,
                      half_width: float | None = None) -> list[dict]:
    """Compare the step-driven and interpolated-driver flows of one walk per n.

    For each n a walk with n*t increments is drawn from stream (seed, n).
    The maps are compared on the line Im z = 1/N at the grid ``times``
    (default: quarters of t, which are knots whenever 4 divides n).
    Each row carries the path distance, the measured sup of |h_n - h|, and
    the analytic bound (exp(2 N^2 t) - 1) * modulus of continuity.
    """
    times = np.linspace(0.0, t, 5) if times is None else np.asarray(times, dtype=float)
    a = 1.0 / N
    rows = []
    for n in n_list:
        m = int(round(n * t))
        w = sample_walk(law, m, seed, n=n, replica=n)
        hw = half_width
        if hw is None:
            knots = knot_values(w)
            hw = float(np.max(np.abs(knots))) + 2.0 * np.sqrt(t) + 10.0
        pairs = [_map_pair(w, tj, a, points, hw) for tj in times]
        P = SigmaPath(times, [p[0] for p in pairs])
        Q = SigmaPath(times, [p[1] for p in pairs])
        dist = path_distance(P, Q, a, distances=[p[3] for p in pairs])
        sup = max(p[2] for p in pairs)
        modulus = modulus_of_continuity(w, t)
        rows.append({
            "n": n,
            "seed": seed,
            "path_distance": dist,
            "sup_diff": sup,
            "modulus": modulus,
            "bound": perturbation_bound(N, t, modulus),
        })
    return rows


def trend_test(rows: list[dict], key: str = "path_distance") -> dict:
    """One-sided Spearman test for a decreasing trend of ``key`` in n."""
    n = np.array([r["n"] for r in rows], dtype=float)
    d = np.array([r[key] for r in rows], dtype=float)
    res = stats.spearmanr(n, d, alternative="less")
    return {"spearman_rho": float(res.statistic), "p_value": float(res.pvalue)}


# ---------------------------------------------------------------------------
# distributional identities


@dataclass
class KSReport:
    statistics: dict = field(default_factory=dict)
    p_values: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def passed(self, alpha: float = 0.01) -> bool:
        return all(p > alpha for p in self.p_values.values())

    def to_dict(self) -> dict:
        return {"statistics": self.statistics, "p_values": self.p_values, **self.extra}


def _ks(a, b):
    a, b = np.asarray(a), np.asarray(b)
    if np.ptp(np.concatenate([a, b])) <= 1e-9 * max(1.0, np.max(np.abs(a))):
        return 0.0, 1.0
    with warnings.catch_warnings():
        # tied discrete summaries make scipy fall back to the asymptotic p-value
        warnings.filterwarnings("ignore", "ks_2samp: Exact calculation unsuccessful")
        res = stats.ks_2samp(a, b)
    return float(res.statistic), float(res.pvalue)


def _summaries(chains, workers):
    rows = _pmap(chain_summaries, chains, workers)
    return {k: np.array([r[k] for r in rows]) for k in ("capacity", "width", "tip_im", "tip_re")}


def stationarity_test(law: IncrementLaw, m: int, k: int, replicas: int, seed: int,
                      workers: int | None = None) -> KSReport:
    """Shifted increments of D versus fresh chains of length k.

    Replica r uses walk stream (seed, r) to build the recentred increment
    chain with drivers S(j) - S(m), j = m..m+k-1, and stream
    (seed, replicas + r) for an independent D(k).  The two samples are
    compared through capacity, footprint width and last-tip height.  The
    footprint width of D(m+1) from the first walk is correlated against the
    increment chain's width as an independence check.
    """
    if k == 0:
        return KSReport({}, {"capacity": 1.0, "width": 1.0, "tip_im": 1.0},
                        {"replicas": replicas})
    inc_chains, fresh_chains, prefix_chains = [], [], []
    for r in range(replicas):
        w = sample_walk(law, m + k - 1, seed, replica=r)
        s = knot_values(w)
        inc_chains.append(SlitChain(1, s[m:m + k] - s[m]))
        prefix_chains.append(SlitChain(1, s[:m + 1]))
        w2 = sample_walk(law, k - 1, seed, replica=replicas + r)
        fresh_chains.append(SlitChain(1, knot_values(w2)))
    A = _summaries(inc_chains, workers)
    B = _summaries(fresh_chains, workers)
    rep = KSReport()
    for key in ("capacity", "width", "tip_im"):
        rep.statistics[key], rep.p_values[key] = _ks(A[key], B[key])
    pre = np.array(_pmap(lambda c: chain_summaries(c)["width"], prefix_chains, workers))
    corr = float(np.corrcoef(pre, A["width"])[0, 1]) if np.ptp(A["width"]) > 0 else 0.0
    rep.extra = {"replicas": replicas, "m": m, "k": k,
                 "independence_corr": corr, "independence_se": 1.0 / np.sqrt(replicas)}
    return rep


def reflection_test(law: IncrementLaw, m: int, replicas: int, seed: int,
                    workers: int | None = None) -> KSReport:
    """Compare D(m) with an independent sample of chi o D(m) o chi.

    chi(x + iy) = -x + iy.  Conjugating by chi amounts to negating the
    drivers, so the second sample is driven by -S from streams
    (seed, replicas + r).
    """
    if not law.symmetric:
        raise ConfigurationError("reflection test needs a symmetric increment law")
    if m == 0:
        return KSReport({}, {"tip_im": 1.0, "tip_re": 1.0, "tip_re_mirror": 1.0},
                        {"replicas": replicas})
    A_chains, B_chains = [], []
    for r in range(replicas):
        A_chains.append(SlitChain(1, knot_values(sample_walk(law, m - 1, seed, replica=r))))
        s = knot_values(sample_walk(law, m - 1, seed, replica=replicas + r))
        B_chains.append(SlitChain(1, -s))
    A = _summaries(A_chains, workers)
    B = _summaries(B_chains, workers)
    rep = KSReport()
    rep.statistics["tip_im"], rep.p_values["tip_im"] = _ks(A["tip_im"], B["tip_im"])
    rep.statistics["tip_re"], rep.p_values["tip_re"] = _ks(A["tip_re"], B["tip_re"])
    rep.statistics["tip_re_mirror"], rep.p_values["tip_re_mirror"] = _ks(A["tip_re"], -B["tip_re"])
    rep.statistics["width"], rep.p_values["width"] = _ks(A["width"], B["width"])
    rep.extra = {"replicas": replicas, "m": m}
    return rep


# ---------------------------------------------------------------------------
# continuity bounds


def random_driver_pairs(count: int, eps_fn, t: float, seed: int, n: int = 8,
                        kappa: float = 1.0):
    """Yield ``(psi, phi, sup_diff)`` with piecewise-linear drivers on [0, t].

    psi interpolates a Gaussian walk of variance ``kappa`` at scale n; phi
    moves each knot by at most ``eps_fn(psi)`` (uniformly at random, with
    one knot at the maximum), so sup|psi - phi| is exactly that value.
    """
    law = IncrementLaw("gaussian", kappa)
    m = int(round(n * t))
    grid = np.arange(m + 1) / n
    for r in range(count):
        w = sample_walk(law, m, seed, n=n, replica=r)
        psi_vals = knot_values(w)
        psi = DriverFunction.from_samples(grid, psi_vals)
        eps = float(eps_fn(psi))
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, r, 1])))
        pert = rng.uniform(-1.0, 1.0, m + 1)
        pert /= np.max(np.abs(pert))
        phi_vals = psi_vals + eps * pert
        phi = DriverFunction.from_samples(grid, phi_vals)
        yield psi, phi, float(np.max(np.abs(phi_vals - psi_vals)))


def continuity_bound_sweep(pairs, t: float, delta_list) -> dict:
    """Count pairs whose hull footprints are further apart than delta.

    ``pairs`` maps each delta to an iterable of (psi, phi, sup_diff), or is
    a single sequence used for every delta.  Pairs violating the
    admissibility bound for their delta are rejected with a
    ConfigurationError rather than silently skipped.
    """
    violations = 0
    checked = 0
    worst = 0.0
    for delta in delta_list:
        thr = continuity_threshold(delta, t)
        group = pairs[delta] if isinstance(pairs, Mapping) else pairs
        for psi, phi, sup in group:
            if not sup < thr:
                raise ConfigurationError(
                    f"pair with sup|psi-phi| = {sup:.3g} is not admissible for delta = {delta}")
            a1, b1 = hull_interval(psi, t)
            a2, b2 = hull_interval(phi, t)
            haus = max(abs(a1 - a2), abs(b1 - b2))
            worst = max(worst, haus / delta)
            violations += haus > delta
            checked += 1
    return {"checked": checked, "violations": int(violations), "worst_ratio": worst}


def perturbation_sweep(count: int, t: float, eps: float, n_list=(1, 2), seed: int = 0,
                       points: int = 101, half_width: float = 8.0, s_grid=None) -> dict:
    """Check sup |u1 - u2| <= (exp(2 n^2 t) - 1) sup|psi - phi| on Im z = 1/n."""
    s_grid = np.linspace(t / 4, t, 4) if s_grid is None else s_grid
    violations = 0
    worst = 0.0
    checked = 0
    for psi, phi, sup in random_driver_pairs(count, lambda _: eps, t, seed):
        for n in n_list:
            z = np.linspace(-half_width, half_width, points) + 1j / n
            diff = 0.0
            for s in s_grid:
                u1 = solve_reverse(psi, z, t, s=s)
                u2 = solve_reverse(phi, z, t, s=s)
                diff = max(diff, float(np.max(np.abs(u1 - u2))))
            bound = perturbation_bound(n, t, sup)
            worst = max(worst, diff / bound)
            violations += diff > bound
            checked += 1
    return {"checked": checked, "violations": int(violations), "worst_ratio": worst}
