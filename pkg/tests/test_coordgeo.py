import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nrh.coordgeo import (CoordinateMetric, NumericTolerance, Poly, TorsionDescriptor, christoffels,
                          connection_coefficients, covariant_curvature, curvature_at, expm, infinitesimal_holonomy,
                          nablaT_residual, p_wedge, sample_points, screen_block)
from nrh.errors import RankUnstable, SingularMetric


def _fd_christoffels(metric, pt, h=1e-5):
    """Koszul formula with metric derivatives from central differences."""
    d = metric.dim
    dg = np.zeros((d, d, d))
    for m in range(d):
        e = np.zeros(d)
        e[m] = h
        dg[m] = (metric.matrix(pt + e) - metric.matrix(pt - e)) / (2 * h)
    ginv = np.linalg.inv(metric.matrix(pt))
    low = 0.5 * (np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg)
    return np.einsum("kl,lij->kij", ginv, low)


def _screen_operator(curv):
    """``S`` with ``R(∂u, ∂x_i) = ∂v ∧ S e_i``, read off from ``R(∂u, ∂x_i)∂u``."""
    n = curv.array.shape[0] - 2
    return np.array([[curv.array[-1, i + 1][j + 1, -1] for i in range(n)] for j in range(n)])


def _random_skew(rng, n):
    W = rng.normal(size=(n, n))
    return W - W.T


def _random_sym(rng, n):
    W = rng.normal(size=(n, n))
    return (W + W.T) / 2


J2 = np.array([[0.0, 1.0], [-1.0, 0.0]])


def test_flat_pp_wave_has_zero_christoffels():
    m = CoordinateMetric.pp_wave(3, 0)
    pt = np.array([0.3, -0.2, 0.5, 0.1, 0.7])
    assert np.array_equal(m.matrix(pt)[0, -1], 1.0)
    assert np.max(np.abs(christoffels(m, pt))) == 0.0
    assert curvature_at(m, None, pt).is_zero(0.0)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_christoffels_match_finite_differences_pp_wave(seed):
    rng = np.random.default_rng(seed)
    n = 3
    names = [f"x{i + 1}" for i in range(n)] + ["u"]
    m = CoordinateMetric.pp_wave(n, Poly.quadratic(_random_sym(rng, n + 1), names))
    pt = sample_points(m.dim, 1, seed)[0]
    assert np.max(np.abs(christoffels(m, pt) - _fd_christoffels(m, pt))) < 1e-8


def test_christoffels_match_finite_differences_plane_wave():
    rng = np.random.default_rng(7)
    m = CoordinateMetric.plane_wave(_random_sym(rng, 3), _random_skew(rng, 3))
    for pt in sample_points(m.dim, 3, 7):
        assert np.max(np.abs(christoffels(m, pt) - _fd_christoffels(m, pt))) < 1e-8


def test_christoffels_match_finite_differences_walker():
    m = CoordinateMetric.walker(
        2,
        h={(1, 2): [{"coeff": 0.3, "powers": {"u": 1}}]},
        A_form={1: [{"coeff": 0.5, "powers": {"x2": 1, "u": 1}}]},
        H=[{"coeff": 1.0, "powers": {"x1": 2}}, {"coeff": -0.4, "powers": {"x1": 1, "x2": 1, "u": 1}}],
    )
    for pt in sample_points(m.dim, 3, 11):
        assert np.max(np.abs(christoffels(m, pt) - _fd_christoffels(m, pt))) < 1e-8


def test_degenerate_walker_metric_raises():
    # h = [[1, 1], [1, 1]] is singular everywhere
    m = CoordinateMetric.walker(2, h={(1, 2): 1.0})
    with pytest.raises(SingularMetric):
        christoffels(m, np.zeros(4))


def test_pp_wave_levi_civita_curvature():
    n = 3
    m = CoordinateMetric.pp_wave(n, Poly.quadratic(np.eye(n), [f"x{i + 1}" for i in range(n)]))
    for pt in sample_points(m.dim, 3, 3):
        curv = curvature_at(m, None, pt)
        g = curv.metric
        for i in range(n):
            e = np.eye(n)[i]
            assert np.allclose(curv.endo(-1, i + 1), p_wedge(g, e), atol=1e-10)
        # only the (u, x_i) components are nonzero
        rest = curv.array.copy()
        rest[-1, 1:-1] = 0
        rest[1:-1, -1] = 0
        assert np.max(np.abs(rest)) < 1e-10


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_pp_wave_with_constant_torsion_matches_algebraic_formula(seed):
    # independent route: R(∂u, X) = ∂v ∧ (Q − ¼ω²)X for H = xᵀQx, ω(∂i, ∂j) = 2ω_ij
    rng = np.random.default_rng(seed)
    n = 4
    Q = _random_sym(rng, n)
    W = _random_skew(rng, n)
    m = CoordinateMetric.pp_wave(n, Poly.quadratic(Q, [f"x{i + 1}" for i in range(n)]))
    T = TorsionDescriptor.from_matrix(W)
    omega = 2 * W  # ω as an endomorphism of the Euclidean screen: ω e_j = Σ_i ω(e_i, e_j) e_i
    expected = Q - 0.25 * omega @ omega
    for pt in sample_points(m.dim, 2, seed):
        curv = curvature_at(m, T, pt)
        assert np.allclose(_screen_operator(curv), expected, atol=1e-9)
        assert nablaT_residual(m, T, pt) < 1e-10


def test_torsion_example_with_two_blocks():
    # H = x1² + x2², T = −2 ∂v∧∂x3∧∂x4: R(∂u, ∂x_j) = ∂v∧∂x_j for all four j
    n = 4
    m = CoordinateMetric.pp_wave(n, Poly.quadratic(np.diag([1.0, 1.0, 0.0, 0.0]), [f"x{i + 1}" for i in range(n)]))
    T = TorsionDescriptor({(3, 4): -1})
    for pt in sample_points(m.dim, 4, 5):
        assert nablaT_residual(m, T, pt) < 1e-10
        curv = curvature_at(m, T, pt)
        assert np.allclose(_screen_operator(curv), np.eye(n), atol=1e-10)
        for j in range(n):
            assert np.allclose(curv.endo(-1, j + 1), p_wedge(curv.metric, np.eye(n)[j]), atol=1e-10)
    hol = infinitesimal_holonomy(m, T, samples=3, seed=5)
    assert hol.rank == n and hol.stable


def test_torsion_example_full_quadratic_rank():
    # H = Σ x_i² with T = +∂v∧∂x3∧∂x4: the x3, x4 block of the screen operator is 1 + ¼ ≠ 0
    n = 4
    m = CoordinateMetric.pp_wave(n, Poly.quadratic(np.eye(n), [f"x{i + 1}" for i in range(n)]))
    T = TorsionDescriptor({(3, 4): 0.5})
    pt = sample_points(m.dim, 1, 9)[0]
    assert nablaT_residual(m, T, pt) < 1e-10
    assert np.allclose(_screen_operator(curvature_at(m, T, pt)), np.diag([1.0, 1.0, 1.25, 1.25]), atol=1e-10)
    assert infinitesimal_holonomy(m, T, samples=3, seed=9).rank == 4


def test_nablaT_residual_zero_torsion_exact():
    m = CoordinateMetric.plane_wave(np.diag([1.0, -2.0]), J2)
    assert nablaT_residual(m, None, np.zeros(4)) == 0.0
    assert nablaT_residual(m, TorsionDescriptor.zero(), np.ones(4)) == 0.0


def test_nablaT_residual_detects_nonconstant_torsion():
    m = CoordinateMetric.pp_wave(2, 0)
    T = TorsionDescriptor({(1, 2): [{"coeff": 1.0, "powers": {"x1": 1}}]})
    tol = NumericTolerance()
    assert nablaT_residual(m, T, np.array([0.0, 0.2, 0.3, 0.1])) > 1e3 * tol.abs_tol


def test_connection_coefficients_split():
    rng = np.random.default_rng(4)
    m = CoordinateMetric.pp_wave(3, Poly.quadratic(_random_sym(rng, 3), ["x1", "x2", "x3"]))
    T = TorsionDescriptor.from_matrix(_random_skew(rng, 3))
    pt = sample_points(m.dim, 1, 4)[0]
    C = connection_coefficients(m, T, pt)
    G = christoffels(m, pt)
    assert np.allclose(C + np.swapaxes(C, 1, 2), 2 * G)  # symmetric part is Levi-Civita
    assert not np.allclose(C, G)


@given(st.integers(1, 5), st.integers(0, 2**31 - 1), st.floats(0.01, 30.0))
@settings(max_examples=30)
def test_expm_matches_scipy(n, seed, scale):
    scipy_linalg = pytest.importorskip("scipy.linalg")
    a = np.random.default_rng(seed).normal(size=(n, n)) * scale / n
    ref = scipy_linalg.expm(a)
    assert np.allclose(expm(a), ref, rtol=1e-10, atol=1e-12 * np.max(np.abs(ref)))


def test_expm_of_skew_is_rotation():
    R = expm(0.7 * J2)
    assert np.allclose(R, [[np.cos(0.7), np.sin(0.7)], [-np.sin(0.7), np.cos(0.7)]])


def test_curvature_invariant_under_v_translation():
    rng = np.random.default_rng(2)
    m = CoordinateMetric.plane_wave(_random_sym(rng, 3), _random_skew(rng, 3))
    T = TorsionDescriptor.from_matrix(m.F)
    pt = sample_points(m.dim, 1, 2)[0]
    shifted = pt.copy()
    shifted[0] += 3.7
    a = covariant_curvature(m, T, pt, depth=1)
    b = covariant_curvature(m, T, shifted, depth=1)
    for x, y in zip(a, b):
        assert np.allclose(x, y, atol=1e-10)


def test_flat_metric_has_trivial_holonomy():
    hol = infinitesimal_holonomy(CoordinateMetric.pp_wave(3, 0), None, samples=3)
    assert hol.rank == 0 and hol.basis == [] and hol.stable


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_plane_wave_screen_operator(seed):
    rng = np.random.default_rng(seed)
    n = 4
    A, F = _random_sym(rng, n), _random_skew(rng, n)
    m = CoordinateMetric.plane_wave(A, F)
    T = TorsionDescriptor.from_matrix(F)
    for pt in sample_points(m.dim, 2, seed):
        E = expm(-pt[-1] * F)
        M = E.T @ A @ E
        curv = curvature_at(m, T, pt)
        assert np.allclose(_screen_operator(curv), M - F @ F, atol=1e-9)
        assert nablaT_residual(m, T, pt) < 1e-9


def test_plane_wave_cancellation_gives_flat_connection():
    # A = −I, F = J: M − F² = −I + I = 0
    m = CoordinateMetric.plane_wave(-np.eye(2), J2)
    T = TorsionDescriptor.from_matrix(J2)
    for pt in sample_points(4, 3, 1):
        assert curvature_at(m, T, pt).is_zero(1e-10)
    assert infinitesimal_holonomy(m, T, samples=3).rank == 0
    # the Levi-Civita connection of the same metric is not flat
    assert infinitesimal_holonomy(m, None, samples=3).rank == 2


def test_holonomy_basis_lies_in_p_wedge_screen():
    rng = np.random.default_rng(8)
    n = 3
    m = CoordinateMetric.plane_wave(_random_sym(rng, n), _random_skew(rng, n))
    T = TorsionDescriptor.from_matrix(m.F)
    hol = infinitesimal_holonomy(m, T, samples=2, seed=8)
    assert hol.rank == n
    g = m.matrix(hol.points[0])
    for b in hol.basis:
        assert np.max(np.abs(screen_block(b))) < 1e-9
        X = b[1:-1, -1]  # (∂v∧X)∂u = X
        assert np.allclose(b, p_wedge(g, X), atol=1e-9)


def test_rank_unstable_when_sample_ranks_disagree():
    # H = x1³ has curvature proportional to x1, vanishing on x1 = 0
    m = CoordinateMetric.pp_wave(2, [{"coeff": 1.0, "powers": {"x1": 3}}])
    pts = [[0.0, 0.5, 0.1, 0.2], [0.1, 0.0, 0.3, 0.4]]
    with pytest.warns(RankUnstable):
        hol = infinitesimal_holonomy(m, None, samples=pts, depth=0)
    assert not hol.stable and hol.sample_ranks == [1, 0]


def test_stable_holonomy_does_not_warn():
    m = CoordinateMetric.plane_wave(np.diag([1.0, 2.0]))
    with warnings.catch_warnings():
        warnings.simplefilter("error", RankUnstable)
        hol = infinitesimal_holonomy(m, None, samples=3)
    assert hol.rank == 2 and hol.stable


def test_tolerance_must_be_positive():
    with pytest.raises(ValueError):
        NumericTolerance(abs_tol=0)


def test_metric_and_torsion_dict_round_trip():
    m = CoordinateMetric.walker(2, h={(1, 2): 0.2}, A_form={2: [{"coeff": 1.0, "powers": {"u": 1}}]},
                                H=[{"coeff": 2.0, "powers": {"x1": 2}}])
    m2 = CoordinateMetric.from_dict(m.to_dict())
    pt = np.array([0.1, 0.2, 0.3, 0.4])
    assert np.array_equal(m.matrix(pt), m2.matrix(pt))
    T = TorsionDescriptor({(2, 1): 0.5})
    assert T.omega[(1, 2)].terms == {(): -0.5}
    T2 = TorsionDescriptor.from_dict(T.to_dict())
    assert T2.omega[(1, 2)].terms == T.omega[(1, 2)].terms


def test_plane_wave_validation():
    with pytest.raises(ValueError):
        CoordinateMetric.plane_wave([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(ValueError):
        CoordinateMetric.plane_wave(np.eye(2), np.eye(2))
