import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nrh.constructions import (BASE_NAMES, FAMILIES, GRID_VALUES, ExtensionInput, base_by_name, build_family,
                               case_matches_label, catalog, d2n2_extension, default_grid, dimL1_model,
                               extend_product, extension_instances, family_constraint_check, flat_base,
                               get_family, kahler_form, product_base, sphere_base, vertical_model)
from nrh.constructions.builders import witt_space
from nrh.errors import FamilyConstraintError, HolonomyOverlap
from nrh.liealg import SubalgebraSO
from nrh.mlinalg import Space, as_endo
from nrh.models import InfinitesimalModel, classify_case, transvection, validate
from nrh.torsioncurv import CurvatureTensor, TorsionTensor


def same_model(a, b):
    """Exact equality of two models after matching basis labels."""
    if sorted(a.space.labels) != sorted(b.space.labels):
        return False
    perm = [b.space.index(lab) for lab in a.space.labels]
    if not np.array_equal(a.space.metric, b.space.metric[np.ix_(perm, perm)]):
        return False
    n = a.dim
    for i in range(n):
        for j in range(n):
            ra = a.R.value(i, j).matrix
            rb = b.R.value(perm[i], perm[j]).matrix[np.ix_(perm, perm)]
            if not np.array_equal(ra, rb):
                return False
    ta, tb = a.T.lowered(), b.T.lowered()[np.ix_(perm, perm, perm)]
    return np.array_equal(ta, tb)


def test_registry_and_unknown_family():
    assert {"dimL1", "dimL2", "dimL3", "dimLge4", "vertical", "plane-wave", "extend-product"} <= set(FAMILIES)
    with pytest.raises(KeyError, match="known"):
        get_family("no-such-family")


def test_unknown_parameter_rejected():
    with pytest.raises(ValueError):
        get_family("dimL1").params({"bogus": 1})


def test_catalog_dimensions():
    for dim in (3, 4, 5):
        fams = catalog(dim)
        assert fams and all(f.dim == dim for f in fams)
    names = {f.name for f in catalog(5)}
    assert {"dim5-berger", "dim5-heisenberg"} <= names


def test_dimL1_flat_base_curvature():
    """C0 = 0, θ = a e1∧e2: R = −θ∘θ and T = e−∧θ."""
    a = Fraction(3, 2)
    m = build_family("dimL1", {"base": "flat2", "t1": a, "a": 1})
    sp = m.space
    th = sp.blade("x1", "x2") * a
    assert m.T == TorsionTensor(sp.blade("e-") ^ th)
    assert m.R == CurvatureTensor.form_times(th, th) * -1
    # R(x1, x2) = −a²·e1∧e2 as a curvature map
    assert m.R.value(sp.index("x1"), sp.index("x2")) == as_endo(sp.blade("x1", "x2") * (-a * a))
    assert validate(m).passed


def test_constraint_failure_lambda_omega():
    rep = family_constraint_check({"lam0": 1}, "vertical")
    assert not rep.passed
    assert [c.clause for c in rep.failed] == ["λ·ω_E = 0"]
    with pytest.raises(FamilyConstraintError):
        build_family("vertical", {"lam0": 1})


@pytest.mark.parametrize("name", ["dimL1", "dimL2", "dimL3", "plane-wave", "extend-product", "dim3-weak"])
def test_all_zero_parameters_pass_vacuously(name):
    fam = get_family(name)
    assert family_constraint_check({k: 0 for k in fam.scalars}, name).passed


def test_constraint_check_from_model():
    m = build_family("dimL2", {"v": 2})
    assert family_constraint_check(m, "dimL2").passed


def test_bad_parameters_reported_as_clause():
    rep = family_constraint_check({"a": "1/0"}, "dimL1")
    assert not rep.passed


def test_dimL2_without_v_is_decomposable():
    m = build_family("dimL2", {"base": "so3", "a": 1, "b": 1, "c": 1, "v": 0, "t1": 0})
    assert validate(m).passed
    assert classify_case(m).case == 3


def test_dim4_plane_wave_derived_series():
    m = build_family("dim4-plane-wave", {"l1": 1, "l2": 2})
    L = transvection(m)
    d1 = L.subalgebra(L.derived())
    d2 = d1.subalgebra(d1.derived())
    assert (d1.dim, d2.dim) == (5, 1)
    # f' = <p, e1, e2, p∧e1, p∧e2>, f'' = <p>
    labels = L.labels
    span1 = {labels[k] for v in L.derived() for k in v}
    assert span1 <= {"p", "e1", "e2", "p^e1", "p^e2"}
    assert d1.derived_series()[-1] == []


# -- extension ---------------------------------------------------------------


def test_extension_d2n2_holonomy():
    m = extend_product(d2n2_extension(1))
    J = m.space.blade("x1", "x2")
    assert m.holonomy == SubalgebraSO(m.space, [J])


def test_extension_without_generators_returns_base():
    base = sphere_base(3, 1)
    assert extend_product(ExtensionInput(base, [])) is base


def test_extension_sphere_plus_rotation():
    base = product_base(sphere_base(3, 1), flat_base(2))
    m = extend_product(ExtensionInput(base, [base.space.blade(3, 4)], [1]))
    assert validate(m).passed
    assert m.holonomy.dim == base.holonomy.dim + 1 == 4


def test_extension_overlap_raises():
    base = sphere_base(2, 1)
    with pytest.raises(HolonomyOverlap):
        extend_product(ExtensionInput(base, [base.space.blade(0, 1)], [1]))


def test_extension_instances_holonomy():
    for name, inp in extension_instances(24):
        m = extend_product(inp)
        assert validate(m).passed, name
        expect = inp.base.holonomy.dim + len(inp.sigmas)
        assert m.holonomy.dim == expect, name


# -- dual routes -------------------------------------------------------------


@pytest.mark.parametrize("beta", [Fraction(-2), Fraction(-1, 2), Fraction(1), Fraction(2)])
def test_timelike_line_equals_negative_extension(beta):
    """The timelike-line builder and the product extension with ε = −1 agree."""
    base = sphere_base(2, beta + 1)
    J = kahler_form(base.space)
    direct = dimL1_model(base, J)
    ext = extend_product(ExtensionInput(base, [J], [-1], ["e-"]), strict=False)
    assert same_model(direct, ext)
    assert same_model(direct, build_family("dim3-so2", {"beta": beta}))


@pytest.mark.parametrize("s1,s2", [(1, 1), (2, Fraction(-1, 2)), (-1, 3)])
def test_vertical_equals_extension_of_flat_lorentz_factor(s1, s2):
    """Vertical factor with ω = λ = 0 versus the extension of flat
    R^{1,3} × R^4 by σ_i = p∧X_i + θ_i."""
    n0 = flat_base(4)
    thetas = [as_endo(n0.space.blade(0, 1)), as_endo(n0.space.blade(2, 3))]
    X = [[s1, 0], [0, s2]]
    direct = vertical_model(n0, thetas, X)
    sp = witt_space([Space.euclidean(2, ["e1", "e2"]), n0.space])
    base = InfinitesimalModel(sp)
    p = sp.blade("p")
    sig = [(p ^ sp.blade("e1")) * s1 + sp.blade("x1", "x2"), (p ^ sp.blade("e2")) * s2 + sp.blade("x3", "x4")]
    ext = extend_product(ExtensionInput(base, sig, [1, 1], ["V1", "V2"]))
    assert same_model(direct, ext)
    assert validate(ext).passed


# -- clauses versus validation -------------------------------------------------


@pytest.mark.parametrize("family", ["dimL1", "dimL2"])
def test_clauses_agree_with_validation(family):
    fam = get_family(family)
    rng = random.Random(7)
    for base in BASE_NAMES:
        for _ in range(3):
            raw = {"base": base, "a": rng.choice(GRID_VALUES), "t1": rng.choice(GRID_VALUES)}
            params = fam.params(raw)
            report = family_constraint_check(params, family)
            m = fam.builder(params)
            assert report.passed == validate(m).passed, (base, raw)


def test_base_names_are_valid():
    for name in BASE_NAMES:
        assert validate(base_by_name(name)).passed, name


# -- grids ------------------------------------------------------------------


def test_default_grid_is_deterministic_and_bounded():
    g1 = default_grid("dimL3", seed=3)
    g2 = default_grid("dimL3", seed=3)
    assert g1 == g2 and 0 < len(g1) <= 49


@pytest.mark.parametrize("family", ["dim3-weak", "dim3-so2", "dim3-so11", "dim4-plane-wave", "dim5-berger",
                                    "dim5-heisenberg", "dim5-L11"])
def test_grid_models_match_label(family):
    fam = get_family(family)
    for point in default_grid(family)[:12]:
        m = build_family(family, point)
        assert validate(m).passed, point
        assert case_matches_label(classify_case(m).case, fam.label), point


@settings(max_examples=4)
@given(st.tuples(*[st.sampled_from([v for v in GRID_VALUES if v]) for _ in range(2)]),
       st.sampled_from([Fraction(0), Fraction(1)]))
def test_vertical_random_parameters(s, lam1):
    """Random valid parameters: every clause passes and the model validates."""
    params = {"s1": s[0], "s2": s[1], "lam1": lam1, "w": 0}
    rep = family_constraint_check(params, "vertical")
    assert rep.passed
    assert validate(build_family("vertical", params)).passed


def test_vertical_needs_surjective_psi():
    rep = family_constraint_check({"s1": 0, "s2": 1}, "vertical")
    assert "ψ surjective" in [c.clause for c in rep.failed]
