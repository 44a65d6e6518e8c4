"""Infinitesimal models: validation, transvection algebras, case detection."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ModelInconsistent, NotAdapted, NotWeaklyIrreducible, SignatureError
from .exact import Echelon, first_nonzero, from_sparse, qmatmul, qzeros, to_sparse
from .liealg import (AbstractLieAlgebra, SubalgebraSO, decompose_module, fixed_vectors, lie_closure,
                     primary_components)
from .mlinalg import SkewEndomorphism, Space, Subspace, format_multivector, format_vector, whole
from .rational import fmt
from .torsioncurv import (CurvatureTensor, TorsionTensor, bianchi_residual, pair_symmetry_violation,
                          second_bianchi_residual)

UNCHECKED = (
    "closedness of the isotropy subgroup (regularity of the reductive decomposition)",
)


class InfinitesimalModel:
    """Triple ``(m, R, T)``: a metric vector space with curvature and torsion.

    ``candidate_splittings`` is an optional list of index lists proposing an
    orthogonal decomposition of ``m``; the case detector tries them when its
    own search does not split the space.
    """

    def __init__(self, space: Space, R: CurvatureTensor | None = None, T: TorsionTensor | None = None,
                 name: str = "", candidate_splittings=None, meta: dict | None = None):
        self.space = space
        self.R = R if R is not None else CurvatureTensor.zero(space)
        self.T = T if T is not None else TorsionTensor.zero(space)
        space.check(self.R.space)
        space.check(self.T.space)
        self.name = name
        self.candidate_splittings = [list(c) for c in (candidate_splittings or [])]
        self.meta = dict(meta or {})
        self._holonomy = None

    @property
    def holonomy(self) -> SubalgebraSO:
        """Span of the curvature values, ``im R``."""
        if self._holonomy is None:
            self._holonomy = _nice_span(self.space, self.R.values())
        return self._holonomy

    @property
    def dim(self) -> int:
        return self.space.dim

    def __repr__(self) -> str:
        return f"InfinitesimalModel({self.name or 'unnamed'}, dim={self.dim}, hol_dim={self.holonomy.dim})"


def _normalize(b: SkewEndomorphism) -> SkewEndomorphism:
    biv = b.bivector()
    lead = biv.coeffs[min(biv.coeffs)]
    return b * (1 / lead)


def _nice_span(space: Space, elems) -> SubalgebraSO:
    """Span whose basis is a greedy selection of the given elements.

    Each chosen element is scaled so its first bivector coefficient is 1,
    which keeps labels like ``p^e1`` readable.
    """
    ech = Echelon()
    chosen = []
    for e in elems:
        if ech.add(e.flat()):
            chosen.append(_normalize(e))
    return SubalgebraSO(space, chosen, keep_basis=True)


# ----------------------------------------------------------------------------
# validation


@dataclass
class CheckResult:
    name: str
    passed: bool
    witness: str = ""

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "witness": self.witness}


@dataclass
class ValidationReport:
    checks: list
    holonomy_dim: int
    closure_dim: int
    decomposable: bool | None = None
    unchecked: tuple = UNCHECKED

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> CheckResult:
        return next(c for c in self.checks if c.name == name)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": [c.as_dict() for c in self.checks],
            "holonomy_dim": self.holonomy_dim,
            "closure_dim": self.closure_dim,
            "holonomy_module_decomposable": self.decomposable,
            "unchecked": list(self.unchecked),
        }

    def text(self) -> str:
        lines = [f"{'PASS' if c.passed else 'FAIL'}  {c.name}" + (f"  [{c.witness}]" if c.witness else "")
                 for c in self.checks]
        lines.append(f"holonomy dim {self.holonomy_dim} (closure {self.closure_dim})")
        if self.decomposable is not None:
            lines.append(f"holonomy module decomposable: {self.decomposable}")
        lines.append("overall: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)


def _tuple_witness(space: Space, idx) -> str:
    if idx is None:
        return ""
    *args, comp = idx
    return "(" + ", ".join(space.labels[i] for i in args) + f") component {space.labels[comp]}"


def validate(m: InfinitesimalModel) -> ValidationReport:
    """Run every algebraic condition for ``(m, R, T)`` to be an infinitesimal model."""
    space = m.space
    g = m.holonomy
    checks = []
    closure = lie_closure(g.basis, space)
    checks.append(CheckResult("holonomy_closed", closure.dim == g.dim,
                              "" if closure.dim == g.dim else f"closure has dim {closure.dim} > {g.dim}"))
    bad = next((b for b in g.basis if not m.R.act_by(b).is_zero()), None)
    checks.append(CheckResult("hol_annihilates_R", bad is None,
                              "" if bad is None else f"xi = {format_multivector(bad.bivector())}"))
    bad = next((b for b in g.basis if not m.T.act_by(b).is_zero()), None)
    checks.append(CheckResult("hol_annihilates_T", bad is None,
                              "" if bad is None else f"xi = {format_multivector(bad.bivector())}"))
    idx = first_nonzero(bianchi_residual(m.R, m.T))
    checks.append(CheckResult("first_bianchi", idx is None, _tuple_witness(space, idx)))
    idx = first_nonzero(second_bianchi_residual(m.R, m.T))
    checks.append(CheckResult("second_bianchi", idx is None,
                              "" if idx is None else "(" + ", ".join(space.labels[i] for i in idx[:3]) + ")"))
    idx = pair_symmetry_violation(m.R)
    checks.append(CheckResult("pair_symmetry", idx is None,
                              "" if idx is None else "(" + ", ".join(space.labels[i] for i in idx) + ")"))
    decomp = None
    if g.dim:
        decomp = len(decompose_module([b.matrix for b in g.basis], space.metric)) > 1
    return ValidationReport(checks, g.dim, closure.dim, decomp)


# ----------------------------------------------------------------------------
# transvection algebra


def holonomy_labels(m: InfinitesimalModel) -> list[str]:
    labels = []
    used = set(m.space.labels)
    for k, b in enumerate(m.holonomy.basis):
        biv = b.bivector()
        lab = format_multivector(biv)
        if len(biv.coeffs) != 1 or lab in used or lab.startswith("-") or "*" in lab:
            lab = f"h{k + 1}"
            while lab in used:
                lab += "'"
        used.add(lab)
        labels.append(lab)
    return labels


def transvection(m: InfinitesimalModel, check: bool = True) -> AbstractLieAlgebra:
    """Lie algebra ``g ⊕ m`` with ``[X, Y] = −R(X, Y) − T(X, Y)``.

    Basis order: holonomy basis first, then the basis of ``m``.
    """
    space = m.space
    g = m.holonomy
    k, n = g.dim, space.dim
    labels = holonomy_labels(m) + list(space.labels)
    def g_coords(e: SkewEndomorphism) -> dict:
        try:
            coords = g.coordinates(e)
        except ValueError:
            raise ModelInconsistent("a bracket leaves the holonomy algebra") from None
        return {i: v for i, v in enumerate(coords) if v}

    br: dict = {}
    for a in range(k):
        for b in range(a + 1, k):
            br[(a, b)] = g_coords(g.basis[a].bracket(g.basis[b]))
        for x in range(n):
            v = g.basis[a](space.basis_vector(x))
            br[(a, k + x)] = {k + i: c for i, c in enumerate(v) if c}
    for x in range(n):
        for y in range(x + 1, n):
            val = {i: -v for i, v in g_coords(m.R.value(x, y)).items()}
            tv = m.T.vector_array()[x, y]
            for i, c in enumerate(tv):
                if c:
                    val[k + i] = -c
            br[(k + x, k + y)] = val
    L = AbstractLieAlgebra(labels, br)
    if check:
        bad = L.jacobi_residual()
        if bad is not None:
            raise ModelInconsistent(f"Jacobi fails on {bad}")
    L.holonomy_dim = k
    return L


def natural_reductivity_violation(m: InfinitesimalModel, L: AbstractLieAlgebra | None = None):
    """First basis triple with ``g([X,Y]_m, Z) ≠ −g([X,Z]_m, Y)``, or None.

    The m-components are read off the transvection algebra's structure
    constants, so this checks the assembled algebra rather than the storage
    of T.
    """
    L = L if L is not None else transvection(m, check=False)
    k, n = L.holonomy_dim, m.dim
    G = m.space.metric

    def m_part(x, y):
        v = L.bracket_basis(k + x, k + y)
        return np.array([v.get(k + i, Fraction(0)) for i in range(n)], dtype=object)

    for x in range(n):
        for y in range(n):
            bxy = m_part(x, y)
            for z in range(n):
                lhs = sum((bxy[i] * G[i, z] for i in range(n)), Fraction(0))
                rhs = -sum((m_part(x, z)[i] * G[i, y] for i in range(n)), Fraction(0))
                if lhs != rhs:
                    return (x, y, z)
    return None


# ----------------------------------------------------------------------------
# change of basis


def transform(m: InfinitesimalModel, P, labels=None) -> InfinitesimalModel:
    """Express the model in the basis ``e'_j = Σ_i P[i, j] e_i``."""
    from .exact import qarray, qeinsum
    from .mlinalg import _inverse

    P = qarray(P)
    Pinv = _inverse(P)
    if Pinv is None:
        raise ValueError("change of basis is singular")
    G = qmatmul(qmatmul(P.T, m.space.metric), P)
    new = Space(G, labels or [f"{l}'" for l in m.space.labels], "general")
    Tl = qeinsum("ia,jb,kc,ijk->abc", P, P, P, m.T.lowered())
    T = TorsionTensor.from_lowered(new, Tl)
    arr = qeinsum("ia,jb,ijts->abts", P, P, m.R.array)
    arr = qeinsum("rt,abts,su->abru", Pinv, arr, P)
    R = CurvatureTensor(new, arr, check=False)
    return InfinitesimalModel(new, R, T, name=m.name, meta=m.meta)


# ----------------------------------------------------------------------------
# weakly irreducible subalgebras of so(1, n+1)


def _rational_isotropic_partner(space: Space, p):
    """Isotropic ``q`` with ``g(p, q) = 1``."""
    gp = space.lower(p)
    j = next(i for i, c in enumerate(gp) if c)
    w = space.basis_vector(j) * (1 / gp[j])
    return w - p * (space.inner(w, w) / 2)


def _project_coords(space: Space, sub: Subspace, v):
    """Coefficients of the orthogonal projection of ``v`` onto nondegenerate ``sub``."""
    from .mlinalg import _inverse

    gram = sub.gram()
    rhs = np.array([space.inner(b, v) for b in sub.basis], dtype=object)
    return qmatmul(_inverse(gram), rhs)


def _project(space: Space, sub: Subspace, v):
    c = _project_coords(space, sub, v)
    out = qzeros(space.dim)
    for ci, b in zip(c, sub.basis):
        out = out + b * ci
    return out


@dataclass
class WeakTypeResult:
    """Which of the four weakly irreducible families a subalgebra belongs to.

    ``phi`` (type 3) and ``psi`` (type 4) are lists aligned with ``h.basis``;
    ``W`` is the subspace with ``p∧W ⊂ g`` (all of the screen except in type 4).
    """

    type: int
    h: SubalgebraSO
    p: np.ndarray
    q: np.ndarray
    screen: Subspace
    W: Subspace
    phi: list | None = None
    psi: list | None = None

    @property
    def m(self) -> int:
        return self.W.dim

    def as_dict(self) -> dict:
        sp = self.screen.space
        d = {"type": self.type, "h_dim": self.h.dim,
             "h_basis": [format_multivector(b.bivector()) for b in self.h.basis],
             "p": format_vector(sp, self.p), "q": format_vector(sp, self.q), "m": self.m}
        if self.phi is not None:
            d["phi"] = [fmt(c) for c in self.phi]
        if self.psi is not None:
            d["psi"] = [format_vector(sp, v) for v in self.psi]
        return d


def find_isotropic_line(g: SubalgebraSO):
    """A rational isotropic vector spanning a g-invariant line, or None."""
    space = g.space
    F = fixed_vectors(g)
    if F.dim:
        rad = F.intersection(F.orthogonal_complement())
        for v in rad.basis:
            return v
    derived = lie_closure([a.bracket(b) for i, a in enumerate(g.basis) for b in g.basis[i + 1:]], space) \
        if g.dim > 1 else SubalgebraSO(space)
    U = fixed_vectors(derived)
    return _joint_eigen_isotropic(space, U, g.basis)


def _joint_eigen_isotropic(space: Space, U: Subspace, gens, depth: int = 0):
    if U.dim == 0:
        return None
    for k, xi in enumerate(gens):
        # restriction of xi to U in the echelon basis
        piv = [min(to_sparse(b)) for b in U.basis]
        M = qzeros((U.dim, U.dim))
        scalar = True
        for j, b in enumerate(U.basis):
            img = xi(b)
            if not U.contains(img):
                return None
            for i, c in enumerate(piv):
                M[i, j] = img[c]
        if any(M[i, j] for i in range(U.dim) for j in range(U.dim) if i != j) or len({M[i, i] for i in range(U.dim)}) > 1:
            scalar = False
        if scalar:
            continue
        for comp in primary_components(M):
            # eigenvectors only for linear factors: check each component for an eigen-subspace
            vecs = []
            for c in comp:
                v = qzeros(space.dim)
                for cj, b in zip(c, U.basis):
                    v = v + b * cj
                vecs.append(v)
            sub = Subspace(space, vecs)
            img = [xi(v) for v in sub.basis]
            lam = _scalar_action(space, sub, xi)
            if lam is None:
                continue
            found = _joint_eigen_isotropic(space, sub, gens[k + 1:], depth + 1)
            if found is not None:
                return found
        return None
    # every generator acts by a scalar on U
    rad = U.intersection(U.orthogonal_complement())
    if rad.dim:
        return rad.basis[0]
    if U.dim and all(_scalar_action(space, U, xi) == 0 for xi in gens):
        return None
    return U.basis[0] if U.is_totally_isotropic() else None


def _scalar_action(space, sub, xi):
    """``λ`` if ``xi`` acts as ``λ·id`` on ``sub``, else None."""
    lam = None
    for v in sub.basis:
        w = xi(v)
        i = next(i for i, c in enumerate(v) if c)
        cand = w[i] / v[i]
        if any(w - v * cand):
            return None
        if lam is None:
            lam = cand
        elif lam != cand:
            return None
    return lam


def weak_type(g: SubalgebraSO, p=None) -> WeakTypeResult:
    """Match ``g ⊂ so(1, n+1)`` against the four weakly irreducible families.

    ``p`` spans the invariant isotropic line; it is searched for when omitted.
    """
    space = g.space
    if p is None:
        p = find_isotropic_line(g)
        if p is None:
            raise NotAdapted("no invariant isotropic line found")
    p = np.asarray(p, dtype=object)
    if space.inner(p, p) != 0 or not any(p):
        raise NotAdapted("p must be a nonzero isotropic vector")
    q = _rational_isotropic_partner(space, p)
    n = space.dim
    screen = Subspace(space, [p, q]).orthogonal_complement()
    NN = n * n
    prE = _projector(space, screen)
    rows = []
    for xi in g.basis:
        img = xi(p)
        a = space.inner(img, q)
        if any(img - p * a):
            raise NotAdapted("g does not preserve the line through p")
        # A = pr_E ∘ xi ∘ pr_E as a full-space endomorphism
        A = qmatmul(qmatmul(prE, xi.matrix), prE)
        X = qmatmul(prE, xi(q))
        row = to_sparse(A.reshape(-1))
        # xi = c·p∧q + A + p∧X with (p∧q)p = −p, so c = −a
        if a:
            row[NN] = -a
        for i, v in enumerate(X):
            if v:
                row[NN + 1 + i] = v
        rows.append(row)
    ech = Echelon(rows)
    h_elems, h_aux, kernel = [], [], []
    for piv, row in zip(ech.pivots, ech.rows()):
        if piv < NN:
            mat = from_sparse({k: v for k, v in row.items() if k < NN}, NN).reshape(n, n)
            h_elems.append(SkewEndomorphism(space, mat, check=False))
            h_aux.append((row.get(NN, Fraction(0)), from_sparse({k - NN - 1: v for k, v in row.items() if k > NN}, n)))
        else:
            kernel.append((row.get(NN, Fraction(0)), from_sparse({k - NN - 1: v for k, v in row.items() if k > NN}, n)))
    h = SubalgebraSO(space, h_elems, keep_basis=True)
    has_pq = any(c and not any(X) for c, X in kernel)
    W = Subspace(space, [X for c, X in kernel if not c])
    a_nonzero = any(c for c, _ in h_aux) or any(c for c, _ in kernel)
    if W.dim == screen.dim:
        if has_pq:
            return WeakTypeResult(1, h, p, q, screen, W)
        if not a_nonzero:
            return WeakTypeResult(2, h, p, q, screen, W)
        phi = [c for c, _ in h_aux]
        if any(c for c, _ in kernel):
            raise NotWeaklyIrreducible("p∧q component not determined by h")
        return WeakTypeResult(3, h, p, q, screen, W, phi=phi)
    if a_nonzero or has_pq:
        raise NotWeaklyIrreducible("g contains a boost but p∧E is not contained in g")
    if W.dim == 0 and h.dim == 0:
        raise NotWeaklyIrreducible("g is zero")
    Wperp = W.orthogonal_complement().intersection(screen)
    psi = [_project(space, Wperp, X) if Wperp.dim else qzeros(n) for _, X in h_aux]
    if Subspace(space, psi).dim != Wperp.dim:
        raise NotWeaklyIrreducible("ψ is not surjective onto the complement of W")
    if not all(W.is_invariant([A]) and all(not any(A(v)) for v in Wperp.basis) for A in h.basis):
        raise NotWeaklyIrreducible("h does not act inside so(W)")
    return WeakTypeResult(4, h, p, q, screen, W, psi=psi)


def _projector(space: Space, sub: Subspace) -> np.ndarray:
    """Matrix of the orthogonal projection onto a nondegenerate subspace."""
    from .mlinalg import _inverse

    if sub.dim == 0:
        return qzeros((space.dim, space.dim))
    B = np.array(sub.basis, dtype=object).T
    gram_inv = _inverse(sub.gram())
    return qmatmul(qmatmul(B, gram_inv), qmatmul(B.T, space.metric))


# ----------------------------------------------------------------------------
# case detection


@dataclass
class CaseLabel:
    """Outcome of :func:`classify_case`.

    ``case`` is 1..7, ``None`` for the torsion-free or flat branch, or
    ``"unknown"``.  ``kind`` is a short readable name.
    """

    case: object
    kind: str
    dim_L: int | None = None
    L: Subspace | None = None
    E: Subspace | None = None
    weak: WeakTypeResult | None = None
    pieces: list = field(default_factory=list)
    evidence: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        sp = (self.L or self.E).space if (self.L or self.E) else None
        d = {"case": self.case, "kind": self.kind, "dim_L": self.dim_L, "evidence": self.evidence}
        if sp is not None:
            d["L"] = [format_vector(sp, v) for v in self.L.basis] if self.L else None
            d["E"] = [format_vector(sp, v) for v in self.E.basis] if self.E else None
        if self.weak is not None:
            d["weak_type"] = self.weak.as_dict()
        return d


def _pieces_to_subspaces(space: Space, pieces) -> list[Subspace]:
    return [Subspace(space, [from_sparse(v, space.dim) for v in basis]) for basis in pieces]


def _orthogonal_lines(sub: Subspace) -> list[Subspace]:
    """Split a nondegenerate subspace into orthogonal lines (rational Gram–Schmidt)."""
    space = sub.space
    vecs = list(sub.basis)
    out = []
    while vecs:
        v = next((v for v in vecs if space.inner(v, v) != 0), None)
        if v is None:
            # all remaining basis vectors null: use a sum with nonzero norm
            a, b = next((a, b) for a in vecs for b in vecs if space.inner(a, b) != 0)
            v = a + b
        out.append(Subspace(space, [v]))
        nv = space.inner(v, v)
        vecs = [w - v * (space.inner(w, v) / nv) for w in vecs]
        vecs = Subspace(space, vecs).basis
    return out


def _refine_trivial(mats, pieces: list[Subspace]) -> list[Subspace]:
    """Split pieces on which every operator vanishes into orthogonal lines."""
    out = []
    for P in pieces:
        if P.dim > 1 and all(not any(qmatmul(M, v)) for M in mats for v in P.basis):
            out.extend(_orthogonal_lines(P))
        else:
            out.append(P)
    return out


def _splitting_from_candidates(m: InfinitesimalModel, ops) -> list[Subspace] | None:
    for cand in m.candidate_splittings:
        subs = [Subspace(m.space, [m.space.basis_vector(i) for i in piece]) for piece in cand]
        if sum(s.dim for s in subs) != m.dim or len(subs) < 2:
            continue
        if all(s.is_nondegenerate() and s.is_invariant(ops) for s in subs):
            if all(m.space.inner(a, b) == 0 for i, s in enumerate(subs) for t in subs[i + 1:]
                   for a in s.basis for b in t.basis):
                return subs
    return None


def classify_case(m: InfinitesimalModel, seed: int = 0) -> CaseLabel:
    """Locate ``m`` in the list of cases 1–7 for Lorentzian models.

    The invariant-subspace search is heuristic (primary decomposition of
    random self-adjoint commutant elements, then user-supplied splittings);
    if it is inconclusive the result is ``case="unknown"``.
    """
    space = m.space
    neg, pos = space.signature()
    if neg != 1:
        raise SignatureError(f"expected Lorentzian signature, got (neg={neg}, pos={pos})")
    g = m.holonomy
    ev = {"holonomy_dim": g.dim}
    if m.R.is_zero():
        return CaseLabel(None, "flat", evidence=ev)
    if m.T.is_zero():
        return CaseLabel(None, "symmetric", evidence=ev)
    gmats = [b.matrix for b in g.basis]
    tops = [m.T.endo(space.basis_vector(i)) for i in range(space.dim)]
    # case 3: joint module of g and T(m) splits
    jmats = gmats + [t.matrix for t in tops]
    joint = _refine_trivial(jmats, _pieces_to_subspaces(space, decompose_module(jmats, space.metric, seed)))
    if len(joint) == 1:
        cand = _splitting_from_candidates(m, [b for b in g.basis] + tops)
        if cand is not None:
            joint = cand
            ev["splitting_source"] = "candidate"
    if len(joint) > 1:
        return CaseLabel(3, "decomposable", pieces=joint, evidence={**ev, "piece_dims": [s.dim for s in joint]})
    pieces = _refine_trivial(gmats, _pieces_to_subspaces(space, decompose_module(gmats, space.metric, seed)))
    if len(pieces) == 1:
        try:
            wt = weak_type(g)
        except (NotAdapted, NotWeaklyIrreducible) as exc:
            if space.dim == 3 and g.dim == 3:
                return CaseLabel(1, "irreducible", dim_L=3, L=whole(space), evidence={**ev, "note": str(exc)})
            return CaseLabel("unknown", "unresolved", evidence={**ev, "note": str(exc)})
        return CaseLabel(2, "weakly-irreducible", dim_L=space.dim, L=whole(space), weak=wt, evidence=ev)
    lorentz = [P for P in pieces if P.signature()[0] == 1]
    if len(lorentz) != 1:
        return CaseLabel("unknown", "unresolved", pieces=pieces, evidence={**ev, "note": "no Lorentzian piece"})
    L = lorentz[0]
    E = L.orthogonal_complement()
    dimL = L.dim
    ev["piece_dims"] = [P.dim for P in pieces]
    wt = None
    if dimL >= 2:
        Lspace, gL = restrict_algebra(g, L)
        try:
            wt = weak_type(gL)
            ev["p"] = format_vector(space, _embed(L, wt.p))
        except (NotAdapted, NotWeaklyIrreducible) as exc:
            ev["note"] = f"induced action on L: {exc}"
    case = {1: 4, 2: 5, 3: 6}.get(dimL, 7)
    return CaseLabel(case, f"dimL{dimL if dimL < 4 else '>=4'}", dim_L=dimL, L=L, E=E, weak=wt,
                     pieces=pieces, evidence=ev)


def restrict_algebra(g: SubalgebraSO, L: Subspace):
    """The action of ``g`` on an invariant nondegenerate ``L``, in L's echelon basis."""
    labels = [f"l{i + 1}" for i in range(L.dim)]
    Ls = Space(L.gram(), labels)
    piv = [min(to_sparse(b)) for b in L.basis]
    mats = []
    for b in g.basis:
        M = qzeros((L.dim, L.dim))
        for j, v in enumerate(L.basis):
            img = b(v)
            for i, c in enumerate(piv):
                M[i, j] = img[c]
        mats.append(SkewEndomorphism(Ls, M))
    return Ls, SubalgebraSO(Ls, mats)


def _embed(L: Subspace, coords) -> np.ndarray:
    out = qzeros(L.space.dim)
    for c, b in zip(coords, L.basis):
        out = out + b * c
    return out
