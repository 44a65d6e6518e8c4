"""Extension of a model by a commuting family of parallel 2-forms.

Given a base model ``(m0, R0, T0)`` with holonomy ``b0`` and commuting skew
endomorphisms ``σ_1..σ_k`` that commute with ``b0`` and annihilate ``R0``
and ``T0``, the new model lives on ``m0 ⊕ <V_1..V_k>`` with
``g(V_i, V_i) = ε_i`` and

    T = T0 + Σ σ_i∧V_i,        R = R0 + Σ ε_i σ_i∘σ_i,

where ``σ_i`` acts by zero on the new directions.  Its holonomy is
``b0 ⊕ n`` whenever the two algebras meet trivially.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import random

from ..errors import FamilyConstraintError, HolonomyOverlap
from ..liealg import SubalgebraSO
from ..mlinalg import Space, as_endo
from ..models import InfinitesimalModel
from ..rational import q
from ..torsioncurv import CurvatureTensor, TorsionTensor
from .assembly import Clause, ConstraintReport, block_space, lift_curvature, lift_endo, lift_multivector, lift_torsion
from .bases import flat_base, kahler_form, product_base, so3_base, sphere_base, u2_base


@dataclass
class ExtensionInput:
    base: InfinitesimalModel
    sigmas: list
    signs: list = field(default_factory=list)
    labels: list | None = None

    def __post_init__(self):
        self.sigmas = [as_endo(s) for s in self.sigmas]
        if not self.signs:
            self.signs = [1] * len(self.sigmas)
        if len(self.signs) != len(self.sigmas):
            raise ValueError("need one sign per 2-form")
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError("signs must be ±1")
        if self.labels is None:
            self.labels = [f"V{i + 1}" for i in range(len(self.sigmas))]


def extension_clauses(inp: ExtensionInput) -> ConstraintReport:
    base, sig = inp.base, inp.sigmas
    b0 = base.holonomy
    n = SubalgebraSO(base.space, sig)
    cl = [
        Clause("[n, n] = 0", n.is_abelian()),
        Clause("[n, b0] = 0", n.commutes_with(b0)),
        Clause("n·T0 = 0", all(base.T.act_by(s).is_zero() for s in sig)),
        Clause("n·R0 = 0", all(base.R.act_by(s).is_zero() for s in sig)),
        Clause("σ_i linearly independent", n.dim == len(sig)),
        Clause("b0 ∩ n = 0", b0.intersection(n).dim == 0, required=False),
    ]
    return ConstraintReport("extend-product", cl)


def extend_product(inp: ExtensionInput, strict: bool = True, name: str = "") -> InfinitesimalModel:
    """Build the extended model; see the module docstring.

    Raises :class:`FamilyConstraintError` when a required clause fails and
    :class:`HolonomyOverlap` (carrying the built model) when ``b0 ∩ n ≠ 0``
    and ``strict`` is set.
    """
    report = extension_clauses(inp)
    if not report.passed:
        raise FamilyConstraintError("extend-product", report.failed)
    base = inp.base
    if not inp.sigmas:
        return base
    extra = Space.orthonormal(inp.signs, inp.labels)
    space = block_space([base.space, extra])
    T = lift_torsion(base.T, space)
    R = lift_curvature(base.R, space)
    lifted = []
    for s, eps, lab in zip(inp.sigmas, inp.signs, inp.labels):
        sb = lift_multivector(s.bivector(), space)
        lifted.append(lift_endo(s, space))
        T = T + TorsionTensor(sb ^ space.blade(lab))
        R = R + CurvatureTensor.form_times(sb, sb) * eps
    splits = [[list(range(base.dim)), list(range(base.dim, space.dim))]]
    model = InfinitesimalModel(space, R, T, name or f"{base.name}+ext{len(inp.sigmas)}",
                               candidate_splittings=splits)
    expected = SubalgebraSO(space, [lift_endo(b, space) for b in base.holonomy.basis] + lifted)
    overlap = base.holonomy.intersection(SubalgebraSO(base.space, inp.sigmas)).dim
    model.meta["expected_holonomy_dim"] = expected.dim
    model.meta["holonomy_matches"] = model.holonomy == expected
    if overlap:
        model.meta["note"] = f"b0 ∩ n has dimension {overlap}; the holonomy claim is not asserted"
        if strict:
            raise HolonomyOverlap(f"b0 and n intersect in dimension {overlap}", model=model)
    return model


# ----------------------------------------------------------------------------
# presets


def d2n2_extension(n: int) -> ExtensionInput:
    """Flat ``R^{1,2n}`` extended by its complex structure with ``ε = +1``.

    The result has dimension ``2n + 2``, torsion ``J∧V`` and curvature
    ``J∘J``.
    """
    labels = ["e-"] + [f"x{i + 1}" for i in range(2 * n)]
    space = Space.orthonormal([-1] + [1] * (2 * n), labels)
    base = InfinitesimalModel(space, name=f"flat(1,{2 * n})")
    return ExtensionInput(base, [kahler_form(space, offset=1)], [1], ["V"])


def extension_instances(count: int = 24, seed: int = 0) -> list[tuple[str, ExtensionInput]]:
    """Deterministic collection of valid extension inputs with ``b0 ∩ n = 0``.

    Mixes flat, spherical, torsion and Kähler-type bases with one or two
    commuting generators and both signs.
    """
    rng = random.Random(seed)
    vals = [q(x) for x in ("-2", "-1", "-1/2", "1/2", "1", "2")]
    out: list[tuple[str, ExtensionInput]] = []

    def flat_plane(signs):
        def make():
            b = flat_base(4)
            c1, c2 = rng.choice(vals), rng.choice(vals)
            sig = [b.space.blade(0, 1) * c1, b.space.blade(2, 3) * c2][: len(signs)]
            return "flat4", ExtensionInput(b, sig, signs)
        return make

    def sphere_plus_plane(sign):
        def make():
            a = rng.choice(vals)
            b = product_base(sphere_base(3, a), flat_base(2))
            return "sphere3xflat2", ExtensionInput(b, [b.space.blade(3, 4) * rng.choice(vals)], [sign])
        return make

    def so3_plus_plane(sign):
        def make():
            a, c = rng.choice(vals), rng.choice(vals)
            b = product_base(so3_base(a, c), flat_base(2))
            return "so3xflat2", ExtensionInput(b, [b.space.blade(3, 4)], [sign])
        return make

    def kahler(sign):
        def make():
            b = product_base(u2_base(rng.choice(vals)), flat_base(2))
            return "u2xflat2", ExtensionInput(b, [b.space.blade(4, 5)], [sign])
        return make

    def sphere2_pair(signs):
        def make():
            b = product_base(sphere_base(2, rng.choice(vals)), flat_base(2))
            sig = [b.space.blade(2, 3) * rng.choice(vals)]
            return "sphere2xflat2", ExtensionInput(b, sig, signs)
        return make

    makers = [flat_plane([1]), flat_plane([-1]), flat_plane([1, -1]), flat_plane([1, 1]),
              sphere_plus_plane(1), sphere_plus_plane(-1), so3_plus_plane(1), so3_plus_plane(-1),
              kahler(1), kahler(-1), sphere2_pair([1]), sphere2_pair([-1])]
    i = 0
    while len(out) < count:
        out.append(makers[i % len(makers)]())
        i += 1
    return out
