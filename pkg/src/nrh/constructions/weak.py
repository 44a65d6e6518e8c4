"""Generators of the four weakly irreducible subalgebra families of so(1, n+1).

Elements are written ``c·p∧q + A + p∧X`` with ``A ∈ so(n)`` acting on the
screen ``e1..en`` of :meth:`Space.witt`, matching :func:`nrh.models.weak_type`.
"""

from __future__ import annotations

import numpy as np

from ..errors import FamilyConstraintError
from ..exact import dense_rank, qarray
from ..liealg import SubalgebraSO, lie_closure
from ..mlinalg import MultiVector, Space, as_endo
from .assembly import Clause, ConstraintReport, lift_endo


def _bracket_span(h: SubalgebraSO) -> SubalgebraSO:
    return SubalgebraSO(h.space, [a.bracket(b) for i, a in enumerate(h.basis) for b in h.basis[i + 1:]])


def _linear_map_kills(h: SubalgebraSO, values, sub: SubalgebraSO) -> bool:
    """Does the linear map ``h.basis[k] ↦ values[k]`` vanish on ``sub``?"""
    for x in sub.basis:
        coords = h.coordinates(x)
        img = sum((np.asarray(v, dtype=object) * c for v, c in zip(values, coords) if c), 0)
        if np.any(np.asarray(img, dtype=object) != 0):
            return False
    return True


def weak_type_clauses(kind: int, h: SubalgebraSO, mapping=None, m: int | None = None) -> ConstraintReport:
    n = h.space.dim
    cl = [Clause("type in 1..4", kind in (1, 2, 3, 4)),
          Clause("h is a subalgebra", h.is_closed())]
    derived = _bracket_span(h)
    if kind == 3:
        phi = [qarray([c]) for c in (mapping or [])]
        cl.append(Clause("φ defined on a basis of h", len(phi) == h.dim))
        cl.append(Clause("φ ≠ 0", any(c[0] for c in phi)))
        cl.append(Clause("φ vanishes on [h, h]", len(phi) == h.dim and _linear_map_kills(h, phi, derived)))
    if kind == 4:
        m = n if m is None else m
        psi = [qarray(v) for v in (mapping or [])]
        cl.append(Clause("0 ≤ m < n", 0 <= m < n))
        cl.append(Clause("ψ defined on a basis of h", len(psi) == h.dim and all(v.shape == (n - m,) for v in psi)))
        cl.append(Clause("h ⊂ so(m)", all(not any(A.matrix[:, j].tolist() + A.matrix[j, :].tolist())
                                           for A in h.basis for j in range(m, n))))
        ok = len(psi) == h.dim and bool(psi)
        cl.append(Clause("ψ surjective onto R^{n-m}", ok and dense_rank(np.array(psi, dtype=object)) == n - m))
        cl.append(Clause("ψ vanishes on [h, h]", ok and _linear_map_kills(h, psi, derived)))
    return ConstraintReport(f"weak-type-{kind}", cl)


def build_weak_type(kind: int, h: SubalgebraSO, mapping=None, m: int | None = None) -> SubalgebraSO:
    """Generators of ``g`` for the given type inside ``so(1, n+1)``.

    ``h`` lives on Euclidean ``R^n`` labelled ``e1..en``.  ``mapping`` is a
    list aligned with ``h.basis``: scalars ``φ(A)`` for type 3, vectors
    ``ψ(A) ∈ R^{n-m}`` (coordinates along ``e_{m+1}..e_n``) for type 4.
    """
    report = weak_type_clauses(kind, h, mapping, m)
    if not report.passed:
        raise FamilyConstraintError(f"weak-type-{kind}", report.failed)
    n = h.space.dim
    space = Space.witt(n)
    p = space.blade("p")
    pq = space.blade("p", "q")
    lifted = [lift_endo(A, space) for A in h.basis]
    gens = []
    if kind == 1:
        gens.append(as_endo(pq))
    if kind in (1, 2):
        gens.extend(lifted)
    if kind == 3:
        gens.extend(as_endo(pq * c) + A for c, A in zip(mapping, lifted))
    span = n
    if kind == 4:
        span = n if m is None else m
        for vec, A in zip(mapping, lifted):
            x = MultiVector.zero(space, 1)
            for j, c in enumerate(qarray(vec)):
                if c:
                    x = x + space.blade(f"e{span + j + 1}") * c
            gens.append(A + as_endo(p ^ x))
    gens.extend(as_endo(p ^ space.blade(f"e{i + 1}")) for i in range(span))
    g = SubalgebraSO(space, gens)
    closure = lie_closure(g.basis, space)
    if closure.dim != g.dim:
        raise FamilyConstraintError(f"weak-type-{kind}", [Clause("bracket closed", False,
                                                                  f"closure has dim {closure.dim} > {g.dim}")])
    return g
