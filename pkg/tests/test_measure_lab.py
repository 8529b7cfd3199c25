import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from discrete_loewner import (
    CompactMeasure,
    DomainError,
    NumericalFailure,
    SigmaMap,
    SigmaPath,
    SlitChain,
    SlitParams,
    cauchy_transform,
    eval_chain,
    eval_slit,
    levy_distance,
    monotone_convolve,
    path_distance,
    reciprocal_cauchy,
    rho_metric,
    sigma_distance,
    stieltjes_invert,
)
from discrete_loewner.measure_lab import measure_from_reciprocal

d0 = CompactMeasure.point(0.0)
pm1 = CompactMeasure.atomic([-1.0, 1.0], [0.5, 0.5])

atomic = st.builds(
    lambda xs, ws: CompactMeasure.atomic(xs, np.asarray(ws) / np.sum(ws)),
    st.lists(st.integers(-8, 8).map(lambda k: k / 4), min_size=3, max_size=3),
    st.lists(st.integers(1, 4), min_size=3, max_size=3),
)
upper = st.builds(complex, st.floats(-4, 4), st.floats(0.05, 4))


def brute_levy(mu, nu, grid=np.linspace(-4, 4, 8001), deltas=np.linspace(0, 1, 1001)):
    F, G = mu.cdf(grid), nu.cdf(grid)
    for d in deltas:
        ok = np.all(F <= nu.cdf(grid + d) + d + 1e-12) and np.all(G <= mu.cdf(grid + d) + d + 1e-12)
        if ok:
            return d
    return 1.0


def test_levy_examples():
    assert levy_distance(d0, d0) == 0
    assert levy_distance(d0, CompactMeasure.point(0.5)) == pytest.approx(0.5)
    assert levy_distance(d0, pm1) == pytest.approx(0.5)


def test_rho_examples():
    assert rho_metric(pm1, pm1) == 0
    assert rho_metric(d0, CompactMeasure.point(1.0)) == pytest.approx(2.0)
    assert rho_metric(CompactMeasure.atomic([0, 1], [0.5, 0.5]), d0) == pytest.approx(1.5)


@given(atomic, atomic)
@settings(max_examples=30, deadline=None)
def test_levy_matches_brute_force(mu, nu):
    assert levy_distance(mu, nu) == pytest.approx(brute_levy(mu, nu), abs=1.5e-3)


@given(atomic, atomic, atomic)
@settings(max_examples=50, deadline=None)
def test_metric_axioms(a, b, c):
    for dist in (levy_distance, rho_metric):
        ab, ba = dist(a, b), dist(b, a)
        assert ab == pytest.approx(ba, abs=1e-12)
        assert dist(a, a) == 0
        assert dist(a, c) <= ab + dist(b, c) + 1e-12
        if ab == 0:
            assert np.allclose(a.atoms, b.atoms) and np.allclose(a.weights, b.weights)


def test_measure_validation():
    with pytest.raises(Exception):
        CompactMeasure.atomic([0.0, 1.0], [0.7, 0.7])
    with pytest.raises(Exception):
        CompactMeasure.atomic([0.0], [-1.0])


def test_measure_json_roundtrip():
    for mu in (pm1, CompactMeasure.arcsine(4, 0.5)):
        back = CompactMeasure.from_json(mu.to_json())
        assert back.to_dict() == mu.to_dict()


def test_arcsine_moments():
    mu = CompactMeasure.arcsine(1, 0.3)
    assert mu.support == pytest.approx((-1.7, 2.3))
    assert mu.mean == pytest.approx(0.3)
    assert mu.variance == pytest.approx(2.0)
    assert mu.cdf(0.3) == pytest.approx(0.5)


def test_cauchy_examples():
    z = 0.3 + 0.7j
    assert complex(cauchy_transform(CompactMeasure.point(0.2), z)) == pytest.approx(1 / (z - 0.2))
    assert complex(cauchy_transform(pm1, 1j)) == pytest.approx(-0.5j)
    arc = CompactMeasure.arcsine(1)
    assert complex(cauchy_transform(arc, 1j)) == pytest.approx(1 / (1j * np.sqrt(5)), abs=1e-12)
    assert complex(cauchy_transform(arc, 1j, method="quadrature")) == pytest.approx(1 / (1j * np.sqrt(5)), abs=1e-9)


def test_cauchy_domain_errors():
    with pytest.raises(DomainError):
        cauchy_transform(CompactMeasure.arcsine(1), 0.5)
    with pytest.raises(DomainError):
        cauchy_transform(pm1, 1.0)


@given(atomic, upper)
def test_cauchy_conjugate_symmetry_and_bound(mu, z):
    g = complex(cauchy_transform(mu, z))
    assert complex(cauchy_transform(mu, z.conjugate())) == pytest.approx(g.conjugate(), abs=1e-12)
    assert abs(g) <= 1 / z.imag * (1 + 1e-12)


@given(st.sampled_from([1, 4, 9]), st.floats(-2, 2), upper)
def test_arcsine_routes_agree(n, a, z):
    mu = CompactMeasure.arcsine(n, a)
    closed = complex(cauchy_transform(mu, z))
    quad = complex(cauchy_transform(mu, z, method="quadrature"))
    assert abs(closed - quad) < 1e-7 * (1 + abs(closed))


def test_reciprocal_examples():
    z = np.array([1j, 2 + 0.3j, -1 + 2j])
    assert np.allclose(reciprocal_cauchy(CompactMeasure.point(0.75), z), z - 0.75)
    for n in (1, 4):
        got = reciprocal_cauchy(CompactMeasure.arcsine(n), z)
        assert np.max(np.abs(got - eval_slit(SlitParams(0.0, n), z))) < 1e-12
    # a translated arcsine law composes the centred transform with z - a
    got = reciprocal_cauchy(CompactMeasure.arcsine(4, 1.5), z)
    assert np.max(np.abs(got - eval_slit(SlitParams(0.0, 4), z - 1.5))) < 1e-12
    # the slit map r_n(a; .) itself belongs to a deformed arcsine law
    got = reciprocal_cauchy(CompactMeasure.slit(4, 1.5), z)
    assert np.max(np.abs(got - eval_slit(SlitParams(1.5, 4), z))) < 1e-12


@pytest.mark.parametrize("n,a,s", [(1, 1.0, 0.0), (4, -0.7, 0.3), (1, 2.5, -1.0)])
def test_deformed_arcsine_law(n, a, s):
    mu = CompactMeasure.slit(n, a, s)
    c = 2 / np.sqrt(n)
    x0, m0 = mu.edge_atom
    assert m0 == pytest.approx(abs(a) / np.hypot(a, c))
    assert complex(eval_slit(SlitParams(a, n), x0 - s)) == pytest.approx(0, abs=1e-12)
    assert mu.mean == pytest.approx(s) and mu.variance == pytest.approx(c * c / 2)
    at = mu.to_atoms()
    assert at.mean == pytest.approx(s, abs=1e-9)
    assert at.variance == pytest.approx(c * c / 2, rel=1e-5)
    z = np.array([1j, 2 + 0.3j, -1 + 2j, 0.1 + 0.05j])
    closed = cauchy_transform(mu, z)
    quad = cauchy_transform(mu, z, method="quadrature")
    assert np.max(np.abs(closed - quad)) < 1e-10
    lo, hi = mu.support
    total = stieltjes_invert(lambda w: cauchy_transform(mu, w), (lo - 1, hi + 1))
    assert total == pytest.approx(1, abs=1e-4)
    assert CompactMeasure.from_json(mu.to_json()).to_dict() == mu.to_dict()


def test_deformed_quantile_is_monotone_and_inverts_cdf():
    mu = CompactMeasure.slit(1, 1.0)
    x0, m0 = mu.edge_atom
    p = np.linspace(0.01, 0.99, 99)
    q = mu.quantile(p)
    assert np.all(np.diff(q) >= 0)
    jump_top = float(mu.cdf(x0))
    off = (p < jump_top - m0 - 1e-9) | (p > jump_top + 1e-9)
    assert np.max(np.abs(mu.cdf(q[off]) - p[off])) < 1e-8
    assert np.all(q[~off] == x0)


def test_reciprocal_raises_imaginary_part():
    mu = CompactMeasure.atomic([-1.0, 0.2, 2.0], [0.3, 0.3, 0.4])
    x, y = np.meshgrid(np.linspace(-6, 6, 121), np.geomspace(1e-2, 1e3, 40))
    z = x + 1j * y
    ratio = np.imag(reciprocal_cauchy(mu, z)) / y
    assert ratio.min() >= 1 - 1e-9
    far = np.imag(reciprocal_cauchy(mu, 1e6j)) / 1e6
    assert far == pytest.approx(1, abs=1e-6)


def test_reciprocal_univalent_only_off_support():
    mu = CompactMeasure.atomic([-1.0, 0.5, 2.0], [0.2, 0.5, 0.3])
    outside = np.concatenate([np.linspace(-8, -1.000001, 200), np.linspace(2.000001, 8, 200)])
    f = reciprocal_cauchy(mu, outside)
    assert np.allclose(np.imag(f), 0)
    left, right = outside[:200], outside[200:]
    assert np.all(np.diff(np.real(reciprocal_cauchy(mu, left))) > 0)
    assert np.all(np.diff(np.real(reciprocal_cauchy(mu, right))) > 0)
    # G changes sign between the atoms, so f has a pole inside [A, B]
    g = np.real(cauchy_transform(mu, np.linspace(-0.99, 0.49, 200)))
    assert g.min() < 0 < g.max()
    assert mu.support == (-1.0, 2.0)


def test_stieltjes_examples():
    assert stieltjes_invert(lambda z: cauchy_transform(d0, z), (0.5, 1.0)) == pytest.approx(0, abs=1e-4)
    arc = CompactMeasure.arcsine(1)
    assert stieltjes_invert(lambda z: cauchy_transform(arc, z), (-2.0, 2.0)) == pytest.approx(1, abs=1e-4)
    assert stieltjes_invert(lambda z: cauchy_transform(pm1, z), (-1.5, 0.0)) == pytest.approx(0.5, abs=1e-4)


def test_stieltjes_recovers_atomic_cdf():
    mu = CompactMeasure.atomic([-1.0, 0.0, 1.5], [0.2, 0.5, 0.3])
    G = lambda z: cauchy_transform(mu, z)  # noqa: E731
    for x in (-0.5, 0.7, 2.0):
        assert stieltjes_invert(G, (-3.0, x)) == pytest.approx(mu.cdf(x), abs=1e-3)


def test_stieltjes_failure_is_reported():
    rng = np.random.default_rng(0)

    def noisy(z):
        z = np.asarray(z)
        return 1 / z + 1j * rng.normal(size=z.shape)

    with pytest.raises(NumericalFailure):
        stieltjes_invert(noisy, (-1.0, 1.0), failure_tol=1e-3)


def test_monotone_convolve_point_masses():
    res = monotone_convolve(CompactMeasure.point(0.25), CompactMeasure.point(-1.0))
    assert res.atoms.tolist() == [-0.75] and res.weights.tolist() == [1.0]
    a, b, c = (CompactMeasure.point(x) for x in (0.5, 1.25, -2.0))
    left = monotone_convolve(monotone_convolve(a, b), c)
    right = monotone_convolve(a, monotone_convolve(b, c))
    assert left.atoms.tolist() == right.atoms.tolist()


def test_monotone_convolve_arcsine_with_point():
    res = monotone_convolve(CompactMeasure.arcsine(4), CompactMeasure.point(1.5))
    assert res.to_dict() == CompactMeasure.arcsine(4, 1.5).to_dict()


def test_monotone_convolve_arcsine_mean():
    arc = CompactMeasure.arcsine(1)
    res = monotone_convolve(arc, arc)
    assert res.weights.sum() == pytest.approx(1, abs=1e-12)
    assert abs(res.mean) < 1e-3
    assert res.variance == pytest.approx(4.0, abs=2e-2)


def test_composition_law_for_slit_measures():
    # the measures with reciprocal transforms r(a), r(b) and r(a) o r(b)
    a, b = 0.0, 2.0
    mu_ab = measure_from_reciprocal(lambda z: eval_chain(SlitChain(1, [a, b]), z), (-6, 8))
    lam = monotone_convolve(CompactMeasure.slit(1, a), CompactMeasure.slit(1, b))
    z = np.linspace(-6, 8, 57) + 1.0j
    exact = eval_chain(SlitChain(1, [a, b]), z)
    assert np.max(np.abs(reciprocal_cauchy(lam, z) - exact)) < 1e-3
    assert np.max(np.abs(reciprocal_cauchy(mu_ab, z) - exact)) < 5e-3
    # both are binned discretisations; they can differ by about one bin width
    assert levy_distance(lam, mu_ab) < 0.04


def test_sigma_distance_examples():
    f = SigmaMap(lambda z: np.asarray(z) - 1, (1.0, 1.0))
    g = SigmaMap(lambda z: np.asarray(z) + 1, (-1.0, -1.0))
    assert sigma_distance(f, f) == 0
    assert sigma_distance(f, g) == pytest.approx(4.0)
    r = SigmaMap.from_measure(CompactMeasure.arcsine(1))
    ident = SigmaMap.identity()
    R = 12.0
    z = np.linspace(-R, R, 401) + 1j
    sup = np.max(np.abs(eval_slit(SlitParams(0, 1), z) - z))
    assert sigma_distance(r, ident) == pytest.approx(sup + 2.0, rel=1e-12)


def test_path_distance_examples():
    ident = SigmaMap.identity()
    shift = SigmaMap(lambda z: np.asarray(z) + 1, (1.0, 1.0))
    times = np.arange(0, 41) / 2
    P = SigmaPath(times, [ident] * len(times))
    assert path_distance(P, P) == 0
    Q = SigmaPath(times, [shift] * len(times))
    # sigma distance is 1 + 1 = 2 at every time
    assert path_distance(P, Q) == pytest.approx(sum(2.0 ** -k * 2 / 3 for k in range(1, 31)), abs=1e-12)
    assert path_distance(P, Q, distances=[1.0] * len(times)) == pytest.approx(0.5, abs=2 ** -30)
    with pytest.raises(DomainError):
        path_distance(P, SigmaPath(times[:5], [ident] * 5))
    with pytest.raises(DomainError):
        SigmaPath([0.5, 1.0], [ident, ident])
