import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import sph_harm_y

from llbm.errors import BodyInvalidError, InputError
from llbm.geometry import Segment, SupportDifference, Zonotope
from llbm.smooth import (
    Ellipsoid,
    EllipsoidSum,
    HarmonicTerm,
    PerturbedBall,
    ball_deficit_identity,
    ball_volume,
    circle_grid,
    curvature_density,
    equality_scan,
    rounded_zonotope_trend,
    smooth_deficit,
    smooth_derivative_check,
    smooth_normalization_constant,
    smooth_terms,
    smooth_volume,
    solid_harmonic,
    sphere_area,
    sphere_grid,
)
from llbm.smooth.bodies import restrict_form

from conftest import seeds

EVEN_3D = [(l, m) for l in (0, 2, 4, 6) for m in range(-l, l + 1)]
GRID3 = sphere_grid()
GRID2 = circle_grid()


def random_unit(rng, k, n=3):
    U = rng.standard_normal((k, n))
    return U / np.linalg.norm(U, axis=1, keepdims=True)


def random_spd(rng, n=3, lo=0.5, hi=2.0):
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return Q @ np.diag(rng.uniform(lo, hi, n)) @ Q.T


def random_perturbed_ball(rng, dim=3, size=0.05):
    # the tangent Hessian of a degree-l harmonic grows like l^2
    if dim == 3:
        terms = [(l, m, rng.uniform(-size, size) / l**2) for l, m in EVEN_3D if l > 0 and rng.random() < 0.3]
    else:
        terms = [(l, s * l, rng.uniform(-size, size) / l**2) for l in (2, 4) for s in (1, -1)]
    return PerturbedBall(dim, rng.uniform(0.8, 1.5), terms)


def euclidean_hessian(H, x, step=1e-4):
    n = len(x)
    out = np.empty((n, n))
    E = np.eye(n) * step
    for i in range(n):
        for j in range(n):
            out[i, j] = (H(x + E[i] + E[j]) - H(x + E[i] - E[j]) - H(x - E[i] + E[j]) + H(x - E[i] - E[j])) / (4 * step**2)
    return out


def homogeneous(body):
    return lambda x: np.linalg.norm(x) * body.values(x / np.linalg.norm(x))[0]


@pytest.mark.parametrize("l,m", [(l, m) for l in range(7) for m in range(-l, l + 1)])
def test_harmonics_match_scipy(l, m):
    rng = np.random.default_rng(l * 31 + m)
    U = random_unit(rng, 50)
    theta, phi = np.arccos(np.clip(U[:, 2], -1, 1)), np.mod(np.arctan2(U[:, 1], U[:, 0]), 2 * np.pi)
    Y = sph_harm_y(l, abs(m), theta, phi)
    if m == 0:
        ref = Y.real
    elif m > 0:
        ref = math.sqrt(2) * Y.real
    else:
        ref = math.sqrt(2) * Y.imag
    ours = solid_harmonic(l, m)(U)
    sign = np.sign(ours @ ref)  # phase conventions differ by (-1)^m only
    assert np.allclose(ours, sign * ref, atol=1e-12)


def test_harmonics_are_orthonormal():
    V = np.stack([solid_harmonic(l, m)(GRID3.nodes) for l, m in EVEN_3D])
    gram = (V * GRID3.weights) @ V.T
    assert np.allclose(gram, np.eye(len(EVEN_3D)), atol=1e-12)
    V2 = np.stack([solid_harmonic(l, s * l, 2)(GRID2.nodes) for l in (2, 4, 6) for s in (1, -1)]
                  + [solid_harmonic(0, 0, 2)(GRID2.nodes)])
    assert np.allclose((V2 * GRID2.weights) @ V2.T, np.eye(7), atol=1e-12)


@pytest.mark.parametrize("l,m", EVEN_3D)
def test_solid_harmonics_are_harmonic(l, m):
    lap = solid_harmonic(l, m).laplacian()
    assert all(abs(c) < 1e-12 for c in lap.terms.values())


def test_harmonic_term_restrictions():
    with pytest.raises(InputError):
        HarmonicTerm(3, 0, 1.0)
    with pytest.raises(InputError):
        HarmonicTerm(8, 0, 1.0)
    with pytest.raises(InputError):
        solid_harmonic(2, 1, 2)


def test_grids_are_calibrated_and_symmetric():
    for g in (GRID3, GRID2, sphere_grid(16, 32, axis=[1.0, 2.0, 3.0], split=True), circle_grid(64, axis=[1, 1])):
        assert g.integrate(np.ones(len(g))) == pytest.approx(sphere_area(g.dim), rel=1e-14)
        assert g.is_symmetric()
    assert len(GRID3.refined()) == 4 * len(GRID3)
    with pytest.raises(InputError):
        sphere_grid(3, 8, split=True)


def test_odd_integrands_vanish():
    U = GRID3.nodes
    for vals in (U[:, 0], U[:, 0] * U[:, 1] ** 2, U[:, 2] ** 3 * np.exp(U[:, 0] ** 2)):
        assert abs(GRID3.integrate(vals)) <= 1e-12


@pytest.mark.parametrize("dim", [2, 3])
def test_ball_volume_calibration(dim):
    for r in (0.5, 1.0, 2.5):
        assert smooth_volume(Ellipsoid.ball(dim, r)) == pytest.approx(ball_volume(dim) * r**dim, rel=1e-12)


def test_ellipsoid_volume_closed_form():
    rng = np.random.default_rng(1)
    for n in (2, 3):
        Q = random_spd(rng, n)
        # Q is the matrix of h, so the body is Q^(1/2) B
        expected = ball_volume(n) * math.sqrt(np.linalg.det(Q))
        assert smooth_volume(Ellipsoid(Q)) == pytest.approx(expected, rel=1e-10)


@given(seeds)
def test_ellipsoid_form_is_euclidean_hessian(seed):
    rng = np.random.default_rng(seed)
    E = Ellipsoid(random_spd(rng))
    u = random_unit(rng, 1)[0]
    assert np.allclose(E.form(u)[0], euclidean_hessian(homogeneous(E), u), atol=1e-6)
    assert E.density(u[None])[0] == pytest.approx(E.density_closed_form(u[None])[0], rel=1e-12)


@given(seeds, st.sampled_from([2, 3]))
def test_perturbed_ball_form_matches_finite_differences(seed, dim):
    rng = np.random.default_rng(seed)
    K = random_perturbed_ball(rng, dim)
    u = random_unit(rng, 1, dim)
    fd = restrict_form(euclidean_hessian(homogeneous(K), u[0])[None], u)
    assert np.allclose(restrict_form(K.form(u), u), fd, atol=1e-6)


def test_invalid_perturbation_is_rejected():
    with pytest.raises(BodyInvalidError):
        PerturbedBall(3, 1.0, [(2, 0, 5.0)])
    with pytest.raises(BodyInvalidError):
        Ellipsoid(np.diag([1.0, -1.0, 1.0]))
    with pytest.raises(InputError):
        PerturbedBall(4, 1.0)


def test_curvature_density_validation():
    B = Ellipsoid.ball(3, 2.0)
    assert curvature_density(B, [0.0, 0.0, 1.0]) == pytest.approx(4.0)
    with pytest.raises(InputError):
        curvature_density(B, [0.0, 0.0, 2.0])
    with pytest.raises(InputError):
        curvature_density(B, [1.0, 0.0])


@given(seeds)
def test_mixed_functionals_match_volume_polynomial(seed):
    # Vol(K + tL) = V + 3t V(K,K,L) + 3t^2 V(K,L,L) + t^3 Vol(L)
    rng = np.random.default_rng(seed)
    K, L = Ellipsoid(random_spd(rng)), Ellipsoid(random_spd(rng))
    terms = smooth_terms(K, L, GRID3)
    vols = [smooth_volume(EllipsoidSum([K, Ellipsoid(t * L.matrix * t)])) for t in (1.0, 2.0)]
    vk, vl = smooth_volume(K), smooth_volume(L)
    A = np.array([[3.0, 3.0], [6.0, 12.0]])
    b = np.array([vols[0] - vk - vl, vols[1] - vk - 8 * vl])
    vkkl, vkll = np.linalg.solve(A, b)
    assert terms.mixed_f == pytest.approx(vkkl, rel=1e-9)
    assert terms.mixed_ff == pytest.approx(vkll, rel=1e-9)


@pytest.mark.parametrize("l,m", [(2, 0), (2, -1), (4, 3), (6, 6)])
def test_ball_deficit_of_harmonic(l, m):
    # ∫Y = 0, ∫Y^2 = 1, ∫|∇Y|^2 = l(l+1) on S^2
    r = smooth_deficit(Ellipsoid.ball(3), HarmonicTerm(l, m, 1.0))
    assert r.deficit == pytest.approx((l * (l + 1) - 3) / 9, rel=1e-11)
    r2 = smooth_deficit(Ellipsoid.ball(2), HarmonicTerm(l, l, 1.0, 2))
    assert r2.deficit == pytest.approx(l * l / 4 - 0.5, rel=1e-11)


@given(seeds, st.sampled_from([2, 3]))
def test_ball_identity_agrees(seed, dim):
    rng = np.random.default_rng(seed)
    f = random_perturbed_ball(rng, dim, size=0.3) - 0.7 * Ellipsoid(random_spd(rng, dim))
    grid = GRID3 if dim == 3 else GRID2
    r = smooth_deficit(Ellipsoid.ball(dim), f, grid=grid)
    assert r.deficit == pytest.approx(ball_deficit_identity(f, grid), abs=1e-12 * r.scale)


@given(seeds)
def test_own_support_gives_zero(seed):
    rng = np.random.default_rng(seed)
    for K in (Ellipsoid(random_spd(rng)), random_perturbed_ball(rng)):
        r = smooth_deficit(K, K)
        assert abs(r.deficit) <= 1e-10 * r.scale
        assert not r.accuracy_warning


@given(seeds)
def test_nonnegative_for_ellipsoid_pairs(seed):
    rng = np.random.default_rng(seed)
    K, L = Ellipsoid(random_spd(rng)), Ellipsoid(random_spd(rng))
    r = smooth_deficit(K, L - 0.5 * K)
    assert r.deficit >= -1e-10 * r.scale


def test_refinement_estimate():
    K = random_perturbed_ball(np.random.default_rng(2))
    r = smooth_deficit(K, HarmonicTerm(4, 1, 1.0))
    assert r.error_estimate is not None and r.error_estimate < 1e-9
    assert smooth_deficit(K, HarmonicTerm(4, 1, 1.0), refine=False).error_estimate is None


@given(seeds)
def test_derivative_check(seed):
    rng = np.random.default_rng(seed)
    K = Ellipsoid(random_spd(rng)) if rng.random() < 0.5 else random_perturbed_ball(rng)
    I = Segment(random_unit(rng, 1)[0] * rng.uniform(0.2, 1.0))
    f = Ellipsoid(random_spd(rng)) - 0.5 * K
    rep = smooth_derivative_check(K, I, f)
    assert rep.passed, rep.as_dict()
    assert rep.deviation < rep.fd_budget


def test_derivative_normalization_kills_square_term():
    rng = np.random.default_rng(4)
    K, I, L = Ellipsoid(random_spd(rng)), Segment([0.3, 0.2, 0.5]), Ellipsoid(random_spd(rng))
    c = smooth_normalization_constant(K, I, L)
    rep = smooth_derivative_check(K, I, L - c * K)
    assert abs(rep.term_square) <= 1e-12 * rep.scale


def test_derivative_check_edge_cases():
    B = Ellipsoid.ball(3)
    assert smooth_derivative_check(B, [0.0, 0.0, 0.0], B).rhs_total == 0.0
    with pytest.raises(InputError):
        smooth_derivative_check(Ellipsoid.ball(2), Segment([1.0, 0.0]), Ellipsoid.ball(2))
    with pytest.raises(InputError):
        smooth_derivative_check(B, Segment([1.0, 0.0, 0.0]), B, steps=[1e-3, 1e-2])


def test_equality_scan():
    rng = np.random.default_rng(8)
    K = Ellipsoid(random_spd(rng))
    cands = [Ellipsoid(2.0**2 * K.matrix), Ellipsoid(random_spd(rng)), random_perturbed_ball(rng, size=0.1)]
    rep = equality_scan(K, cands)
    assert rep.passed, rep.as_dict()
    assert [c["homothetic"] for c in rep.candidates] == [True, False, False]
    assert all(c["deficit"] > 1e-6 for c in rep.candidates[1:])


def test_rounded_zonotope_trend():
    Z = Zonotope([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    f = SupportDifference(Zonotope([[1.0, -1.0]]))
    rep = rounded_zonotope_trend(Z, f)
    assert rep["monotone_gap"]
    assert abs(rep["rows"][-1]["gap"]) < abs(rep["rows"][0]["gap"])
