"""Named parametrised families, their constraint clauses and parameter grids.

A family turns a :class:`FamilyParams` into an :class:`InfinitesimalModel`.
Each one lists the clauses its parameters must satisfy; required clauses
gate :func:`build_family`, non-required ones mark degenerate (decomposable
or flat) parameter values and are used to filter the default grids.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
import random
from typing import Callable

import numpy as np

from ..errors import FamilyConstraintError
from ..exact import dense_rank, qarray, qzeros
from ..liealg import SubalgebraSO
from ..mlinalg import MultiVector, Space, as_endo, interior, so_action
from ..models import InfinitesimalModel, validate
from ..rational import fmt, parse_rational, q
from ..torsioncurv import CurvatureTensor, TorsionTensor
from .assembly import Clause, ConstraintReport, lift_endo, lift_multivector
from .bases import base_by_name, flat_base, kahler_form, product_base, sphere_base, u2_base
from .builders import (dimL1_model, dimL2_model, dimL3_model, dimLge4_model, lie_group_model,
                       plane_wave_model, vertical_model)
from .extension import d2n2_extension, extend_product

GRID_VALUES = tuple(Fraction(x) for x in ("-2", "-1", "-1/2", "0", "1/2", "1", "2"))
GRID_LIMIT = 49

# catalog label -> case number reported by classify_case (None = torsion-free branch)
LABEL_CASES = {
    "symmetric": (None, 1),
    "plane-wave": (2,),
    "timelike-line": (4,),
    "lorentz-plane": (5,),
    "lorentz-3": (6,),
    "lorentz-4plus": (7,),
}


class FamilyParams(dict):
    """Parameter values by name; rationals are stored as Fractions."""

    @classmethod
    def parse(cls, raw: dict | None) -> "FamilyParams":
        out = cls()
        for k, v in (raw or {}).items():
            if isinstance(v, str):
                try:
                    v = parse_rational(v)
                except ValueError:
                    pass
            elif isinstance(v, (int, Fraction)) and not isinstance(v, bool):
                v = q(v)
            out[k] = v
        return out

    def as_strings(self) -> dict:
        return {k: fmt(v) if isinstance(v, Fraction) else v for k, v in self.items()}


@dataclass
class Family:
    name: str
    summary: str
    defaults: dict
    scalars: tuple
    clauses: Callable
    builder: Callable
    label: str | None = None
    dim: int | None = None
    integers: tuple = ()
    meta: dict = field(default_factory=dict)

    def params(self, raw=None) -> FamilyParams:
        p = FamilyParams.parse(self.defaults)
        given = FamilyParams.parse(raw)
        unknown = set(given) - set(p)
        if unknown:
            raise ValueError(f"{self.name}: unknown parameter(s) {sorted(unknown)}; known: {sorted(p)}")
        p.update(given)
        for k in self.integers:
            v = p[k]
            if not (isinstance(v, Fraction) and v.denominator == 1 and v > 0):
                raise ValueError(f"{self.name}: parameter {k} must be a positive integer")
            p[k] = int(v)
        return p


FAMILIES: dict[str, Family] = {}


def _register(fam: Family) -> Family:
    FAMILIES[fam.name] = fam
    return fam


def get_family(name: str) -> Family:
    try:
        return FAMILIES[name]
    except KeyError:
        raise KeyError(f"unknown family {name!r}; known: {', '.join(sorted(FAMILIES))}") from None


# ----------------------------------------------------------------------------
# clause helpers


def _base_clause(base: InfinitesimalModel) -> Clause:
    rep = validate(base)
    return Clause("base is an infinitesimal model", rep.passed,
                  ", ".join(c.name for c in rep.failures()))


def _annihilates(xis, tensor, what: str, who: str = "θ") -> Clause:
    xis = [x for x in xis if x is not None]
    ok = all(tensor.act_by(x).is_zero() for x in xis)
    return Clause(f"{who}·{what} = 0", ok)


def _commutes_with_image(xis, base: InfinitesimalModel, who: str = "θ") -> Clause:
    b0 = base.holonomy
    ok = all(SubalgebraSO(base.space, [x]).commutes_with(b0) for x in xis if x is not None)
    return Clause(f"{who} commutes with im C0", ok)


def _nonzero(x, what: str) -> Clause:
    return Clause(f"{what} ≠ 0", x != 0, required=False)


def _theta_on(base: InfinitesimalModel, t1, t2):
    """``t1 x1∧x2 + t2 x3∧x4`` on the base; None for the zero element."""
    sp = base.space
    th = MultiVector.zero(sp, 2)
    if t1:
        th = th + sp.blade(0, 1) * t1
    if t2:
        if sp.dim < 4:
            raise ValueError("t2 needs a base of dimension at least 4")
        th = th + sp.blade(2, 3) * t2
    return None if th.is_zero() else as_endo(th)


def _base(p) -> InfinitesimalModel:
    return base_by_name(p["base"], p["a"], p["b"], p["c"])


# ----------------------------------------------------------------------------
# timelike line


def _dimL1_clauses(p):
    base = _base(p)
    th = _theta_on(base, p["t1"], p["t2"])
    return [_base_clause(base), _commutes_with_image([th], base),
            _annihilates([th], base.R, "C0"), _annihilates([th], base.T, "ω_E"),
            Clause("θ ≠ 0", th is not None, required=False),
            Clause("R ≠ 0", not dimL1_model(base, th if th is not None else as_endo(MultiVector.zero(base.space, 2)))
                   .R.is_zero(), required=False)]


def _dimL1_build(p):
    base = _base(p)
    th = _theta_on(base, p["t1"], p["t2"])
    return dimL1_model(base, th if th is not None else as_endo(MultiVector.zero(base.space, 2)))


_BASE_DEFAULTS = {"base": "sphere2", "a": 1, "b": 1, "c": 0}

_register(Family("dimL1", "timelike line: T = e-∧θ + ω_E, R = C0 − θ∘θ",
                 {**_BASE_DEFAULTS, "a": 2, "t1": 1, "t2": 0}, ("a", "t1"), _dimL1_clauses, _dimL1_build,
                 label="timelike-line"))


# ----------------------------------------------------------------------------
# Lorentzian plane


def _dimL2_clauses(p):
    base = _base(p)
    th = _theta_on(base, p["t1"], p["t2"])
    return [_base_clause(base), _commutes_with_image([th], base),
            _annihilates([th], base.R, "C0"), _annihilates([th], base.T, "ω_E1"),
            _nonzero(p["v"], "v"), Clause("θ ≠ 0", th is not None, required=False)]


def _dimL2_build(p):
    base = _base(p)
    return dimL2_model(base, _theta_on(base, p["t1"], p["t2"]), p["v"], p["alpha"])


_register(Family("dimL2", "Lorentzian plane: T = p∧q∧v + θ∧v + ω_E1",
                 {**_BASE_DEFAULTS, "t1": 1, "t2": 0, "v": 1, "alpha": 1}, ("a", "t1", "v", "alpha"),
                 _dimL2_clauses, _dimL2_build, label="lorentz-plane"))


# ----------------------------------------------------------------------------
# Lorentzian 3-space


def _dimL3_parts(p):
    base = _base(p)
    return base, _theta_on(base, p["t1"], p["t2"]), _theta_on(base, p["l1"], p["l2"])


def _coupling(p, th, lam) -> Clause:
    """``v²θ + αλ`` couples E to L through ``R(q, e1)``."""
    z = None
    for x, c in ((th, p["v"] * p["v"]), (lam, p["alpha"])):
        if x is not None and c:
            z = x * c if z is None else z + x * c
    return Clause("v²θ + αλ ≠ 0", z is not None and not z.is_zero(), required=False)


def _dimL3_clauses(p):
    base, th, lam = _dimL3_parts(p)
    return [_base_clause(base),
            _commutes_with_image([th], base), _commutes_with_image([lam], base, "λ"),
            _annihilates([th], base.R, "C0"), _annihilates([th], base.T, "ω_E1"),
            _annihilates([lam], base.R, "C0", "λ"), _annihilates([lam], base.T, "ω_E1", "λ"),
            Clause("[θ, λ] = 0", th is None or lam is None or th.bracket(lam).is_zero()),
            _nonzero(p["v"], "v"), Clause("θ ≠ 0", th is not None, required=False),
            _coupling(p, th, lam)]


def _dimL3_build(p):
    base, th, lam = _dimL3_parts(p)
    return dimL3_model(base, th, lam, p["v"], p["alpha"], p["beta"])


_register(Family("dimL3", "Lorentzian 3-space: T = p∧(α e1∧q + e1∧v + λ) + ω_E1 + θ∧v",
                 {**_BASE_DEFAULTS, "t1": 1, "t2": 0, "l1": 1, "l2": 0, "v": 1, "alpha": 1, "beta": 1},
                 ("a", "t1", "l1", "v", "alpha", "beta"), _dimL3_clauses, _dimL3_build, label="lorentz-3"))


# ----------------------------------------------------------------------------
# Lorentzian factor of dimension >= 4 (preset: base sphere2(a), n = <x1∧x2>, k = 2)


def _ge4_parts(p):
    base = sphere_base(2, p["a"])
    J = as_endo(base.space.blade(0, 1))
    K = qarray([[p["k1"], 0], [0, p["k2"]]])
    omega = qarray([[0, p["w"]], [-p["w"], 0]])
    lam = {("x1", "x2"): p["lam"]} if p["lam"] else None
    zeta1 = qarray([[p["z"], 0], [0, 0]])
    return base, [J], K, omega, zeta1, lam


def _ge4_clauses(p):
    base, thetas, K, omega, zeta1, lam = _ge4_parts(p)
    m = dimLge4_model(base, thetas, K, omega, zeta1, lam)
    return ge4_clauses(m, base, thetas, K, zeta1)


def _e_parts(m: InfinitesimalModel):
    """``ζ`` (the ``p``-coefficient of T), its part ``λ`` on E and ``ω_E``."""
    sp = m.space
    zeta = _p_coefficient(m.T.three_form, sp)
    E = {i for i, lab in enumerate(sp.labels) if lab not in ("p", "q") and not lab.startswith("e")}
    lam = MultiVector(sp, 2, {key: c for key, c in zeta.coeffs.items() if set(key) <= E})
    omega_E = MultiVector(sp, 3, {key: c for key, c in m.T.three_form.coeffs.items() if set(key) <= E})
    return zeta, lam, omega_E


def ge4_clauses(m: InfinitesimalModel, base: InfinitesimalModel, thetas, K, zeta1=None) -> list:
    """Clauses of the ``dim L ≥ 4`` construction, evaluated on the assembled model.

    ``zeta1`` is the k×dim(E1) coefficient matrix of the mixed part of ``ζ``.
    """
    sp = m.space
    k, l = K.shape[0], len(thetas)
    Z = qarray(zeta1) if zeta1 is not None else qarray(np.zeros((k, base.dim), dtype=int).tolist())
    n = SubalgebraSO(base.space, thetas)
    b0 = base.holonomy
    rk = [sp.index(f"e{a + 1}") for a in range(k)]
    X = [x[rk] for x in m.meta["X"]]
    zeta, lam, omega_E = _e_parts(m)
    b = [lift_endo(x, sp) for x in list(b0.basis) + list(thetas)]
    w1 = base.T.three_form
    # ζ1(e_a) ∈ E1 and the image ζ1(E1) ⊂ R^k (columns of Z)
    z1_on_rk = [sum((base.space.basis_vector(j) * Z[a, j] for j in range(base.dim)), qzeros(base.dim))
                for a in range(k)]
    cols = [Z[:, j] for j in range(base.dim) if any(Z[:, j])]
    r1 = dense_rank(np.array(cols, dtype=object)) if cols else 0
    r2 = dense_rank(np.array(X, dtype=object)) if X else 0
    r12 = dense_rank(np.array(cols + X, dtype=object)) if cols or X else 0
    return [_base_clause(base),
            Clause("k ≥ 2 and l ≤ k", k >= 2 and l <= k),
            Clause("n commutative", n.is_abelian()),
            Clause("n commutes with b0", n.commutes_with(b0)),
            _annihilates(thetas, base.R, "C0", "n"),
            _annihilates(thetas, base.T, "ω_E1", "n"),
            Clause("θ_i linearly independent", n.dim == l),
            Clause("K symmetric", all(K[i, j] == K[j, i] for i in range(k) for j in range(k))),
            Clause("im K + ζ2(E0) = R^k",
                   dense_rank(np.array([K[:, a] for a in range(k)] + X, dtype=object)) == k),
            Clause("λ·ω_E = 0", so_action(as_endo(lam), omega_E).is_zero()),
            Clause("b·ζ = 0", all(so_action(x, zeta).is_zero() for x in b)),
            Clause("ω_E1(ζ1(R^k)) = 0", all(interior(v, w1).is_zero() for v in z1_on_rk if any(v))),
            Clause("ζ1(E1) ∩ ζ2(E0) = 0", r12 == r1 + r2)]


def _p_coefficient(t: MultiVector, sp: Space) -> MultiVector:
    """``ζ`` in ``t = p∧ζ + (terms without p)``."""
    i = sp.index("p")
    out = {}
    for key, c in t.coeffs.items():
        if i in key:
            pos = key.index(i)
            rest = key[:pos] + key[pos + 1:]
            out[rest] = out.get(rest, 0) + (-1) ** pos * c
    return MultiVector(sp, 2, out)


def _ge4_build(p):
    base, thetas, K, omega, zeta1, lam = _ge4_parts(p)
    return dimLge4_model(base, thetas, K, omega, zeta1, lam)


_register(Family("dimLge4", "Lorentzian factor of dim ≥ 4: T = p∧ζ + ω_E (base sphere2(a), n = <x1∧x2>, k = 2)",
                 {"a": 0, "k1": 1, "k2": 1, "w": 0, "lam": 0, "z": 0}, ("a", "k1", "k2", "w", "lam"),
                 _ge4_clauses, _ge4_build, label="lorentz-4plus"))


# ----------------------------------------------------------------------------
# vertical Lorentzian factor (preset: flat E1 = R^4, θ1 = x1∧x2, θ2 = x3∧x4)


def _vertical_parts(p):
    base = flat_base(4)
    sp = base.space
    thetas = [as_endo(sp.blade(0, 1)), as_endo(sp.blade(2, 3))]
    X = qarray([[p["s1"], 0], [0, p["s2"]]])
    omega = qarray([[0, p["w"]], [-p["w"], 0]])
    lam = {}
    if p["lam1"]:
        lam[("x1", "x2")] = p["lam1"]
    if p["lam0"]:
        lam[("V1", "V2")] = p["lam0"]
    return base, thetas, X, omega, lam or None


def vertical_clauses(m: InfinitesimalModel, base: InfinitesimalModel, thetas, X) -> list:
    """Clauses of the vertical construction, evaluated on the assembled model."""
    sp = m.space
    k = len(thetas)
    n0 = SubalgebraSO(base.space, thetas)
    b0 = base.holonomy
    b = b0 + n0
    zeta, lam, omega_E = _e_parts(m)
    wE1 = lift_multivector(base.T.three_form, sp)
    blift = [lift_endo(x, sp) for x in b.basis]
    tlift = [lift_endo(t, sp) for t in thetas]
    cl = [_base_clause(base),
          Clause("k ≥ 2", k >= 2),
          Clause("θ_i mutually commuting", n0.is_abelian()),
          Clause("θ_i linearly independent", n0.dim == k),
          Clause("n0 ∩ b0 = 0", n0.intersection(b0).dim == 0),
          Clause("b·θ_i = 0", n0.commutes_with(b)),
          Clause("b·ω_E1 = 0", all(so_action(x, wE1).is_zero() for x in blift)),
          Clause("b·λ = 0", all(so_action(x, lam).is_zero() for x in blift)),
          Clause("θ_i·λ = 0", all(so_action(t, lam).is_zero() for t in tlift)),
          Clause("θ_i·ω_E1 = 0", all(so_action(t, wE1).is_zero() for t in tlift)),
          Clause("θ_i·C0 = 0", all(base.R.act_by(t).is_zero() for t in thetas)),
          Clause("λ·ω_E = 0", so_action(lam, omega_E).is_zero()),
          Clause("ψ surjective", dense_rank(X) == k)]
    # ψ: b0 -> 0, θ_i -> X_i, evaluated through coordinates in the basis (b0, θ)
    basis = list(b0.basis) + list(thetas)
    values = [np.zeros(k, dtype=object) for _ in b0.basis] + [X[i] for i in range(k)]
    bb = SubalgebraSO(base.space, basis, keep_basis=True)

    def psi(xi):
        coords = bb.coordinates(xi)
        return sum((v * c for v, c in zip(values, coords)), np.zeros(k, dtype=object))

    derived = [x.bracket(y) for i, x in enumerate(b.basis) for y in b.basis[i + 1:]]
    cl.append(Clause("ψ vanishes on [b, b]", all(not any(psi(d)) for d in derived)))
    ok = True
    for i in range(base.dim):
        for j in range(i + 1, base.dim):
            x, y = base.space.basis_vector(i), base.space.basis_vector(j)
            C = base.R(x, y)
            for t in thetas:
                C = C + t * base.space.inner(t(x), y)
            lhs = psi(C)
            rhs = sum((X[a] * base.space.inner(t(x), y) for a, t in enumerate(thetas)), np.zeros(k, dtype=object))
            if any(lhs - rhs):
                ok = False
    cl.append(Clause("ψ(C(Y,Z)) = Σ θ_i(Y,Z) X_i", ok))
    return cl


def _vertical_clauses(p):
    base, thetas, X, omega, lam = _vertical_parts(p)
    m = vertical_model(base, thetas, X, omega, lam)
    return vertical_clauses(m, base, thetas, X)


def _vertical_build(p):
    base, thetas, X, omega, lam = _vertical_parts(p)
    return vertical_model(base, thetas, X, omega, lam)


_register(Family("vertical", "vertical Lorentzian factor: g = {p∧ψ(A) + A} over flat R^4 with θ = x1∧x2, x3∧x4",
                 {"s1": 1, "s2": 1, "w": 0, "lam1": 0, "lam0": 0}, ("s1", "s2", "w", "lam1", "lam0"),
                 _vertical_clauses, _vertical_build, label="lorentz-4plus"))


# ----------------------------------------------------------------------------
# plane waves


def _pw_parts(p):
    n = p["n"]
    if n > 4:
        raise ValueError("plane-wave family supports n ≤ 4")
    K = qarray(np.diag([p[f"k{i + 1}"] for i in range(n)]).tolist()) if n else None
    W = qarray(np.zeros((n, n), dtype=object).tolist())
    for (i, j), name in (((0, 1), "w12"), ((2, 3), "w34")):
        if j < n and p[name]:
            W[i, j], W[j, i] = p[name], -p[name]
    return K, W


def _pw_clauses(p):
    K, W = _pw_parts(p)
    n = p["n"]
    return [Clause("n ≥ 1", n >= 1),
            Clause("K nondegenerate", dense_rank(K) == n, "im K = R^n makes the holonomy weakly irreducible",
                   required=False),
            Clause("ω ≠ 0", any(W.reshape(-1)), required=False)]


def _pw_build(p):
    K, W = _pw_parts(p)
    return plane_wave_model(K, W)


_register(Family("plane-wave", "homogeneous plane wave: T = p∧ω, R(q, X) = p∧K X",
                 {"n": 2, "k1": 1, "k2": 1, "k3": 1, "k4": 1, "w12": 1, "w34": 0},
                 ("k1", "k2", "w12"), _pw_clauses, _pw_build, label="plane-wave", integers=("n",)))


# ----------------------------------------------------------------------------
# flat group and its extension preset


def _d2n2_ext_build(p):
    return extend_product(d2n2_extension(p["n"]), name=f"extend-product-d2n2({p['n']})")


def _d2n2_ext_clauses(p):
    from .extension import extension_clauses

    return extension_clauses(d2n2_extension(p["n"])).clauses


_register(Family("extend-product", "product extension preset: flat R^{1,2n} extended by J with ε = +1",
                 {"preset": "d2n2", "n": 1}, (), _d2n2_ext_clauses, _d2n2_ext_build, integers=("n",)))

_register(Family("lie-group-d2n2", "flat group model: R = 0, T = −[·,·] of the oscillator-type algebra",
                 {"n": 1}, (), lambda p: [Clause("n ≥ 1", p["n"] >= 1)], lambda p: lie_group_model(p["n"]),
                 label="symmetric", integers=("n",)))


# ----------------------------------------------------------------------------
# dimension 3


def _dim3_weak(p):
    sp = Space.witt(1, ["p", "e", "q"])
    T = TorsionTensor(sp.blade("p", "e", "q"))
    R = CurvatureTensor.from_values(sp, {("q", "e"): sp.blade("p", "e") * p["alpha"]})
    return InfinitesimalModel(sp, R, T, "dim3-weak")


def _dim3_irreducible(p):
    sp = Space.witt(1, ["p", "e", "q"])
    T = TorsionTensor(sp.blade("p", "e", "q") * p["s"])
    return InfinitesimalModel(sp, CurvatureTensor.constant(sp, p["c"]), T, "dim3-irreducible")


def _dim3_so2(p):
    base = sphere_base(2, p["beta"] + 1)
    return dimL1_model(base, as_endo(kahler_form(base.space)), "dim3-so2")


def _dim3_so11(p):
    return dimL2_model(None, None, 1, p["beta"], "dim3-so11")


_register(Family("dim3-weak", "T = p∧e∧q, R(q,e) = α p∧e", {"alpha": 1}, ("alpha",),
                 lambda p: [_nonzero(p["alpha"], "α")], _dim3_weak, label="plane-wave", dim=3))
_register(Family("dim3-irreducible", "T = s·p∧e∧q, R = c X∧Y", {"c": 1, "s": 1}, ("c", "s"),
                 lambda p: [_nonzero(p["c"], "c")], _dim3_irreducible, label="symmetric", dim=3))
_register(Family("dim3-so2", "T = e-∧e1∧e2, R(e1,e2) = β e1∧e2", {"beta": 1}, ("beta",),
                 lambda p: [_nonzero(p["beta"], "β")], _dim3_so2, label="timelike-line", dim=3))
_register(Family("dim3-so11", "T = p∧q∧e, R(p,q) = β p∧q", {"beta": 1}, ("beta",),
                 lambda p: [_nonzero(p["beta"], "β")], _dim3_so11, label="lorentz-plane", dim=3))


# ----------------------------------------------------------------------------
# dimension 4


def _dim4_pw(p):
    return plane_wave_model([[p["l1"], 0], [0, p["l2"]]], [[0, 1], [-1, 0]], "dim4-plane-wave")


def _dim4_r3_base(gamma) -> InfinitesimalModel:
    """R^3 with C0 = (γ+1) x1∧x2 ∘ x1∧x2 and torsion x1∧x2∧x3."""
    b = product_base(sphere_base(2, gamma + 1), flat_base(1))
    return InfinitesimalModel(b.space, b.R, TorsionTensor(b.space.blade(0, 1, 2)), f"r3({fmt(q(gamma))})")


def _dim4_timelike(name):
    def build(p):
        base = _dim4_r3_base(p["gamma"])
        return dimL1_model(base, as_endo(base.space.blade(0, 1)), name)
    return build


_register(Family("dim4-plane-wave", "T = p∧e1∧e2, R(q,X) = p∧K X, K = diag(l1, l2)", {"l1": 1, "l2": 1},
                 ("l1", "l2"), lambda p: [_nonzero(p["l1"] * p["l2"], "l1·l2")], _dim4_pw,
                 label="plane-wave", dim=4))
_register(Family("dim4-sl2-r2", "T = e1∧e2∧(e- + e3), R(e1,e2) = γ e1∧e2 with γ > 0", {"gamma": 1}, ("gamma",),
                 lambda p: [Clause("γ > 0", p["gamma"] > 0)], _dim4_timelike("dim4-sl2-r2"),
                 label="timelike-line", dim=4))
_register(Family("dim4-su2-r2", "T = e1∧e2∧(e- + e3), R(e1,e2) = γ e1∧e2 with γ < 0", {"gamma": -1}, ("gamma",),
                 lambda p: [Clause("γ < 0", p["gamma"] < 0)], _dim4_timelike("dim4-su2-r2"),
                 label="timelike-line", dim=4))


# ----------------------------------------------------------------------------
# dimension 5


def _dim5_pw(p):
    K = [[p["k1"], 0, 0], [0, p["k2"], 0], [0, 0, p["k3"]]]
    return plane_wave_model(K, [[0, p["w"], 0], [-p["w"], 0, 0], [0, 0, 0]], "dim5-plane-wave")


def _berger(p):
    base = u2_base(p["a"])
    return dimL1_model(base, as_endo(kahler_form(base.space) * p["b"]), "dim5-berger")


def _two_planes(name, a_key, b_key):
    def build(p):
        a = p[a_key] if a_key else 0
        b = p[b_key] if b_key else 0
        base = product_base(sphere_base(2, a), sphere_base(2, b))
        sp = base.space
        th = sp.blade(0, 1) * p["c1"] + sp.blade(2, 3) * p["c2"]
        return dimL1_model(base, as_endo(th), name)
    return build


def _L11(p):
    base = sphere_base(2, p["c"])
    return dimL2_model(base, as_endo(kahler_form(base.space) * p["a"]), 1, p["b"] - 1, "dim5-L11")


def _L12(p):
    base = sphere_base(2, p["c"])
    lam = as_endo(kahler_form(base.space) * p["a"])
    return dimL3_model(base, None, lam, 0, p["alpha"], p["beta"], line=False, name="dim5-L12")


_register(Family("dim5-plane-wave", "T = p∧ω, R(q,X) = p∧K X on R^{1,4}",
                 {"k1": 1, "k2": 1, "k3": 1, "w": 1}, ("k1", "k2", "k3", "w"),
                 lambda p: [_nonzero(p["k1"] * p["k2"] * p["k3"], "k1·k2·k3"), _nonzero(p["w"], "ω")],
                 _dim5_pw, label="plane-wave", dim=5))
_register(Family("dim5-berger", "timelike line over u(2): C0 of constant holomorphic curvature a, θ = bJ",
                 {"a": 1, "b": 1}, ("a", "b"),
                 lambda p: [_nonzero(p["a"], "a"), _nonzero(p["b"], "b")], _berger,
                 label="timelike-line", dim=5))
_register(Family("dim5-so2so2", "timelike line over S^2 × S^2: θ = c1 x1∧x2 + c2 x3∧x4",
                 {"a": 1, "b": 2, "c1": 1, "c2": 1}, ("a", "b", "c1", "c2"),
                 lambda p: [_nonzero(p["a"] * p["b"], "a·b"), _nonzero(p["c1"] * p["c2"], "c1·c2")],
                 _two_planes("dim5-so2so2", "a", "b"), label="timelike-line", dim=5))
_register(Family("dim5-so2", "timelike line over S^2 × R^2: θ = c1 x1∧x2 + c2 x3∧x4",
                 {"a": 1, "c1": 1, "c2": 1}, ("a", "c1", "c2"),
                 lambda p: [_nonzero(p["a"], "a"), _nonzero(p["c1"] * p["c2"], "c1·c2")],
                 _two_planes("dim5-so2", "a", None), label="timelike-line", dim=5))
_register(Family("dim5-heisenberg", "timelike line over flat R^4: θ = c1 x1∧x2 + c2 x3∧x4",
                 {"c1": 1, "c2": 1}, ("c1", "c2"),
                 lambda p: [_nonzero(p["c1"] * p["c2"], "c1·c2")],
                 _two_planes("dim5-heisenberg", None, None), label="timelike-line", dim=5))
_register(Family("dim5-L11", "Lorentzian plane over S^2(c): T = (p∧q + a x1∧x2)∧v, α = b − 1",
                 {"a": 1, "b": 2, "c": 1}, ("a", "b", "c"),
                 lambda p: [_nonzero(p["a"], "a")], _L11, label="lorentz-plane", dim=5))
_register(Family("dim5-L12", "Lorentzian 3-space over S^2(c): T = p∧(α e1∧q + a x1∧x2)",
                 {"alpha": 1, "beta": 1, "a": 1, "c": 1}, ("alpha", "beta", "a", "c"),
                 lambda p: [_nonzero(p["a"], "a"),
                            Clause("holonomy acts nontrivially on L", p["beta"] != 0 or p["alpha"] * p["a"] != 0,
                                   required=False)],
                 _L12, label="lorentz-3", dim=5))


# ----------------------------------------------------------------------------
# public entry points


def family_constraint_check(target, family: str, params=None) -> ConstraintReport:
    """Evaluate every clause of ``family``.

    ``target`` is either parameters (dict or :class:`FamilyParams`) or a model
    built by the family, in which case ``params`` must be supplied or be
    stored in ``model.meta["params"]``.
    """
    fam = get_family(family)
    if isinstance(target, InfinitesimalModel):
        raw = params if params is not None else target.meta.get("params")
    else:
        raw = target
    p = fam.params(raw)
    try:
        clauses = list(fam.clauses(p))
    except ValueError as exc:
        clauses = [Clause("parameters well formed", False, str(exc))]
    return ConstraintReport(family, clauses)


def build_family(family: str, params=None) -> InfinitesimalModel:
    """Assemble the model; raises FamilyConstraintError on a failed required clause."""
    fam = get_family(family)
    p = fam.params(params)
    report = family_constraint_check(p, family)
    if not report.passed:
        raise FamilyConstraintError(family, report.failed)
    m = fam.builder(p)
    m.name = family
    m.meta["family"] = family
    m.meta["params"] = p.as_strings()
    if fam.label:
        m.meta["label"] = fam.label
    return m


def iter_grid(family: str):
    """All grid points of the family's scalar parameters, in a fixed order."""
    fam = get_family(family)
    for vals in product(GRID_VALUES, repeat=len(fam.scalars)):
        yield dict(zip(fam.scalars, vals))


def default_grid(family: str, limit: int | None = GRID_LIMIT, generic: bool = True, seed: int = 0) -> list[dict]:
    """Grid points passing the family's clauses.

    With at most two scalars the full product is used (49 points at most).
    Larger products are visited in a seeded shuffled order and cut at
    ``limit`` accepted points.  ``generic`` also drops points failing a
    non-required clause (flat or decomposable degenerations).
    """
    points = list(iter_grid(family))
    if len(points) > (limit or len(points)):
        random.Random(seed).shuffle(points)
    out = []
    for pt in points:
        rep = family_constraint_check(pt, family)
        if rep.passed and (rep.generic or not generic):
            out.append(pt)
            if limit and len(out) >= limit:
                break
    return out


def catalog(dim: int) -> list[Family]:
    """Families of indecomposable models shipped for a given dimension."""
    return [f for f in FAMILIES.values() if f.dim == dim]


def case_matches_label(case, label: str) -> bool:
    return case in LABEL_CASES.get(label, ())
