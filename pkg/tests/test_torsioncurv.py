from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nrh.errors import GradeError
from nrh.exact import dense_rank
from nrh.liealg import SubalgebraSO, so_algebra
from nrh.mlinalg import MultiVector, Space, as_endo
from nrh.torsioncurv import (BIANCHI_SIGN, COMMUTATOR_COEFF, NESTED_COEFF, CurvatureTensor, TorsionTensor,
                             berger_check, curvature_from_lc, curvature_space, first_bianchi_holds,
                             p_space, pair_symmetry_check, sigma_of)
from strategies import multivectors


def _brute_sigma(T: TorsionTensor, space: Space):
    """σ_T(X,Y,Z,W) by direct evaluation of the 3-form on basis vectors."""
    n = space.dim
    e = [space.basis_vector(i) for i in range(n)]
    ginv = space.inverse_metric

    def tv(x, y):  # T(X, Y) as a vector: raise the last slot of T(X, Y, ·)
        low = [T.three_form.evaluate(x, y, e[c]) for c in range(n)]
        return np.array([sum(ginv[a, c] * low[c] for c in range(n)) for a in range(n)], dtype=object)

    out = {}
    for a, b, c, d in combinations(range(n), 4):
        s = Fraction(0)
        for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
            s += T.three_form.evaluate(tv(e[x], e[y]), e[z], e[d])
        if s:
            out[(a, b, c, d)] = s
    return out


def _form_values(t: MultiVector):
    """Values of the metric-dual form on increasing basis tuples."""
    e = [t.space.basis_vector(i) for i in range(t.space.dim)]
    vals = {k: t.evaluate(*(e[i] for i in k)) for k in combinations(range(t.space.dim), t.grade)}
    return {k: v for k, v in vals.items() if v}


def test_sigma_vanishes_for_null_torsion():
    sp = Space.witt(4)
    omega = sp.blade("e1", "e2") + sp.blade("e3", "e4") * 2 + sp.blade("e1", "e4") * Fraction(-1, 2)
    assert sigma_of(TorsionTensor(sp.blade("p") ^ omega)).is_zero()


def test_sigma_in_dimension_three_is_zero():
    sp = Space.witt(1)
    assert sigma_of(TorsionTensor(sp.blade(0, 1, 2))).is_zero()


def test_sigma_regression_r5():
    sp = Space.euclidean(5)
    T = TorsionTensor(sp.blade(0, 1, 2) + sp.blade(0, 3, 4))
    sigma = sigma_of(T)
    assert not sigma.is_zero()
    assert _form_values(sigma) == _brute_sigma(T, sp)
    # hand value: σ(e2,e3,e4,e5) = g(T(T(e2,e3),e4),e5) = g(T(e1,e4),e5) = 1
    assert sigma.coeffs == {(1, 2, 3, 4): 1}


@given(st.data())
def test_sigma_matches_brute_force(data):
    sp = Space.orthonormal(data.draw(st.lists(st.sampled_from([1, -1]), min_size=4, max_size=5)))
    T = TorsionTensor(data.draw(multivectors(sp, 3)))
    assert _form_values(sigma_of(T)) == _brute_sigma(T, sp)


def test_torsion_requires_three_vector():
    with pytest.raises(GradeError):
        TorsionTensor(Space.euclidean(3).blade(0, 1))


def test_bianchi_examples():
    sp = Space.witt(3)
    T = TorsionTensor(sp.blade("p") ^ (sp.blade("e1", "e2") + sp.blade("e2", "e3")))
    assert first_bianchi_holds(CurvatureTensor.zero(sp), T)
    e = Space.euclidean(4)
    assert first_bianchi_holds(CurvatureTensor.constant(e))
    w = Space.witt(1)
    assert first_bianchi_holds(CurvatureTensor.zero(w), TorsionTensor(w.blade(0, 1, 2)))


def test_bianchi_sign_constant():
    """On R^5 with T = e123 + e145 and Rg(X,Y) = 2X∧Y the induced curvature
    satisfies the first identity only with the pinned sign."""
    sp = Space.euclidean(5)
    T = TorsionTensor(sp.blade(0, 1, 2) + sp.blade(0, 3, 4))
    R = curvature_from_lc(CurvatureTensor.constant(sp, 2), T)
    assert BIANCHI_SIGN == 1
    assert first_bianchi_holds(R, T, sign=BIANCHI_SIGN)
    assert not first_bianchi_holds(R, T, sign=-BIANCHI_SIGN)


def _so3_group():
    """so(3) with a bi-invariant metric: [e1,e2]=e3 and cyclic."""
    sp = Space.euclidean(3)
    ad = [as_endo(sp.blade(1, 2)), as_endo(sp.blade(2, 0)), as_endo(sp.blade(0, 1))]
    return sp, ad


def test_lie_group_connection_is_flat():
    """T(X,Y) = −[X,Y] and Rg = −¼ ad_[X,Y] give zero curvature."""
    sp, ad = _so3_group()
    # ad_{e_i} e_j = [e_i, e_j]; check the basis choice first
    assert list(ad[0](sp.basis_vector(1))) == list(sp.basis_vector(2))
    T = TorsionTensor(sp.blade(0, 1, 2) * -1)
    assert list(T(sp.basis_vector(0), sp.basis_vector(1))) == list(-sp.basis_vector(2))
    Rg = CurvatureTensor.from_values(sp, {(0, 1): ad[2] * Fraction(-1, 4), (1, 2): ad[0] * Fraction(-1, 4),
                                          (2, 0): ad[1] * Fraction(-1, 4)})
    assert curvature_from_lc(Rg, T).is_zero()
    assert COMMUTATOR_COEFF == Fraction(-1, 4) and NESTED_COEFF == Fraction(1, 2)


def test_curvature_from_lc_without_torsion():
    sp = Space.euclidean(4)
    Rg = CurvatureTensor.constant(sp, 3)
    assert curvature_from_lc(Rg, TorsionTensor.zero(sp)) == Rg


def test_curvature_from_lc_volume_form():
    """Rg = 0 and T the volume form of R^{1,2}: matrix evaluation of
    −¼[T_X, T_Y] + ½T_{T(X,Y)}, frozen."""
    sp = Space.orthonormal([-1, 1, 1])
    T = TorsionTensor(sp.blade(0, 1, 2))
    R = curvature_from_lc(CurvatureTensor.zero(sp), T)
    n = sp.dim
    TX = [T.endo(sp.basis_vector(i)).matrix for i in range(n)]
    for i in range(n):
        for j in range(n):
            comm = TX[i].dot(TX[j]) - TX[j].dot(TX[i])
            txy = T(sp.basis_vector(i), sp.basis_vector(j))
            nested = sum((TX[k] * txy[k] for k in range(n)), np.zeros((n, n), dtype=object))
            expect = comm * Fraction(-1, 4) + nested * Fraction(1, 2)
            assert R.value(i, j).matrix.tolist() == expect.tolist()
    # frozen: R(e0, e1) = −¼ e0∧e1
    assert R.value(0, 1) == as_endo(sp.blade(0, 1) * Fraction(-1, 4))


def test_pp_wave_correction():
    sp = Space.witt(2)
    omega = sp.blade("e1", "e2") * 2
    T = TorsionTensor(sp.blade("p") ^ omega)
    Rg = CurvatureTensor.from_values(sp, {("q", "e1"): sp.blade("p", "e1"), ("q", "e2"): sp.blade("p", "e2") * 3})
    R = curvature_from_lc(Rg, T)
    W = as_endo(omega).matrix[1:3, 1:3]
    K0 = np.array([[1, 0], [0, 3]], dtype=object)
    K = K0 - W.dot(W) * Fraction(1, 4)
    for i, lab in enumerate(("e1", "e2")):
        Ke = K[:, i]
        expect = sp.blade("p") ^ (sp.blade("e1") * Ke[0] + sp.blade("e2") * Ke[1])
        assert R(sp.basis_vector("q"), sp.basis_vector(lab)) == as_endo(expect)


def test_pair_symmetry_examples():
    sp = Space.euclidean(4)
    assert pair_symmetry_check(CurvatureTensor.constant(sp))
    bad = CurvatureTensor.from_values(sp, {(0, 1): sp.blade(2, 3)})
    assert not pair_symmetry_check(bad)


def test_from_values_rejects_inconsistent_pairs():
    sp = Space.euclidean(3)
    with pytest.raises(ValueError):
        CurvatureTensor.from_values(sp, {(0, 1): sp.blade(0, 1), (1, 0): sp.blade(0, 1)})


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_curvature_space_of_null_translations(k):
    sp = Space.witt(k)
    g = SubalgebraSO(sp, [sp.blade("p", f"e{i}") for i in range(1, k + 1)])
    cs = curvature_space(g, None)
    assert not cs.is_empty and cs.particular.is_zero()
    assert cs.linear_dim == k * (k + 1) // 2
    q = sp.basis_vector("q")
    for R in cs.homogeneous_basis:
        # only R(q, X) is nonzero and R(q, e_i) = p∧K e_i with K symmetric
        K = np.zeros((k, k), dtype=object)
        for a in range(sp.dim):
            for b in range(sp.dim):
                if "q" not in (sp.labels[a], sp.labels[b]):
                    assert R.value(a, b).is_zero()
        for i in range(k):
            img = R(q, sp.basis_vector(f"e{i + 1}"))
            bv = img.bivector()
            for (a, b), c in bv.coeffs.items():
                assert a == 0 and 1 <= b <= k
                K[b - 1, i] = c
        assert (K == K.T).all()
    assert berger_check(g, None)


def test_curvature_space_trivial_cases():
    sp = Space.witt(1)
    empty = SubalgebraSO(sp)
    cs = curvature_space(empty, None)
    assert not cs.is_empty and cs.linear_dim == 0
    cs = curvature_space(empty, TorsionTensor(sp.blade(0, 1, 2)))
    assert not cs.is_empty and cs.particular.is_zero()
    assert berger_check(empty, None)


def test_curvature_space_empty_when_sigma_nonzero():
    sp = Space.euclidean(5)
    T = TorsionTensor(sp.blade(0, 1, 2) + sp.blade(0, 3, 4))
    assert curvature_space(SubalgebraSO(sp), T).is_empty


def test_berger_boost_line():
    """span{p∧q} in R^{1,2}: hand solution R(p,q) = c·p∧q, R(p,e) = R(e,q) = 0."""
    sp = Space.witt(1)
    g = SubalgebraSO(sp, [sp.blade("p", "q")])
    cs = curvature_space(g, None)
    assert cs.linear_dim == 1
    (R,) = cs.homogeneous_basis
    assert R.value(0, 1).is_zero() and R.value(1, 2).is_zero() and not R.value(0, 2).is_zero()
    assert berger_check(g, None)


def test_p_space_examples():
    e2 = Space.euclidean(2)
    ps = p_space(so_algebra(e2))
    # no cyclic condition in dimension 2: every map R^2 → so(2) is allowed,
    # in particular P(e1) = −c·e1∧e2, P(e2) = 0
    rows = [[P.values[i].bivector().coeffs.get((0, 1), 0) for i in range(2)] for P in ps]
    assert len(ps) == 2 and dense_rank(rows) == 2
    assert p_space(SubalgebraSO(e2)) == []
    # so(3) on R^3: nine unknowns and one cyclic equation
    ps3 = p_space(so_algebra(Space.euclidean(3)))
    assert len(ps3) == 8 and all(P.cyclic_ok() for P in ps3)
