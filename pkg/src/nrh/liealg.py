"""Subalgebras of so(r,s), abstract Lie algebras and their identification."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
import random
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError
from .exact import Echelon, from_sparse, inertia, nullspace, qeinsum, qmatmul, qzeros, to_sparse
from .mlinalg import MultiVector, SkewEndomorphism, Space, Subspace, as_endo, endo_bivector, format_multivector, so_action


# ----------------------------------------------------------------------------
# subalgebras of so(r, s)


class SubalgebraSO:
    """Linear span of skew endomorphisms with a canonical echelon basis.

    ``SubalgebraSO.span`` builds the plain span; :func:`lie_closure` builds the
    smallest bracket-closed span.  :meth:`is_closed` tells which one you have.
    """

    def __init__(self, space: Space, elements: Iterable = (), keep_basis: bool = False):
        self.space = space
        ech = Echelon()
        kept = []
        for e in elements:
            e = as_endo(e)
            space.check(e.space)
            if ech.add(e.flat()):
                kept.append(e)
        self._ech = ech
        if keep_basis:
            self.basis = kept
            self._kept = True
        else:
            self.basis = [SkewEndomorphism.from_flat(space, r) for r in ech.rows()]
            self._kept = False

    span = classmethod(lambda cls, space, elements=(): cls(space, elements))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, xi) -> bool:
        return self._ech.contains(as_endo(xi).flat())

    __contains__ = contains

    def coordinates(self, xi) -> list[Fraction]:
        """Coordinates along :attr:`basis`; raises ValueError outside the span."""
        f = as_endo(xi).flat()
        coords = self._ech.coordinates(f)
        if not self._kept:
            return coords
        from .exact import solve

        piv = self._ech.pivots
        rows = [{k: b.flat()[c] for k, b in enumerate(self.basis) if c in b.flat()} for c in piv]
        sol = solve(rows, coords, len(self.basis))
        return [sol.get(k, Fraction(0)) for k in range(len(self.basis))]

    def element(self, coords: Sequence) -> SkewEndomorphism:
        out = SkewEndomorphism.zero(self.space)
        for c, b in zip(coords, self.basis):
            if c:
                out = out + b * c
        return out

    def contains_algebra(self, other: "SubalgebraSO") -> bool:
        return all(self.contains(b) for b in other.basis)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SubalgebraSO):
            return NotImplemented
        return self.space == other.space and self.dim == other.dim and self.contains_algebra(other)

    def __add__(self, other: "SubalgebraSO") -> "SubalgebraSO":
        return SubalgebraSO(self.space, self.basis + other.basis)

    def intersection(self, other: "SubalgebraSO") -> "SubalgebraSO":
        from .exact import span_intersection

        rows = span_intersection([b.flat() for b in self.basis], [b.flat() for b in other.basis])
        return SubalgebraSO(self.space, [SkewEndomorphism.from_flat(self.space, r) for r in rows])

    def is_closed(self) -> bool:
        return all(self.contains(a.bracket(b)) for i, a in enumerate(self.basis) for b in self.basis[i + 1:])

    def commutes_with(self, other) -> bool:
        others = other.basis if isinstance(other, SubalgebraSO) else [as_endo(x) for x in other]
        return all(a.bracket(b).is_zero() for a in self.basis for b in others)

    def is_abelian(self) -> bool:
        return self.commutes_with(self)

    def bivectors(self) -> list[MultiVector]:
        return [endo_bivector(b) for b in self.basis]

    def __repr__(self) -> str:
        return f"SubalgebraSO(dim={self.dim}, basis=[{', '.join(format_multivector(b) for b in self.bivectors())}])"


def lie_closure(gens: Iterable, space: Space | None = None) -> SubalgebraSO:
    """Smallest bracket-closed subspace containing ``gens``."""
    gens = [as_endo(g) for g in gens]
    if space is None:
        if not gens:
            raise ValueError("need a space when there are no generators")
        space = gens[0].space
    ech = Echelon()
    elems: list[SkewEndomorphism] = []
    for g in gens:
        if ech.add(g.flat()):
            elems.append(g)
    i = 0
    while i < len(elems):
        for j in range(i):
            c = elems[i].bracket(elems[j])
            if ech.add(c.flat()):
                elems.append(c)
        i += 1
    return SubalgebraSO(space, elems)


def so_algebra(space: Space) -> SubalgebraSO:
    """The full orthogonal algebra so(space)."""
    n = space.dim
    return SubalgebraSO(space, [space.blade(i, j) for i in range(n) for j in range(i + 1, n)])


def stabilizer(ambient: SubalgebraSO, subspace: Subspace) -> SubalgebraSO:
    """Elements of ``ambient`` mapping ``subspace`` into itself."""
    comp = subspace.orthogonal_complement()
    # xi(U) ⊂ U  iff  g(xi u, w) = 0 for all u in U, w in U^⊥
    cols = []
    for b in ambient.basis:
        vals = {}
        k = 0
        for u in subspace.basis:
            xu = b(u)
            for w in comp.basis:
                x = ambient.space.inner(xu, w)
                if x:
                    vals[k] = x
                k += 1
        cols.append(vals)
    return _kernel_of_columns(ambient, cols)


def line_stabilizer(space: Space, p) -> SubalgebraSO:
    """so(space)_{Rp}: the stabiliser of the line through ``p``."""
    return stabilizer(so_algebra(space), Subspace(space, [p]))


def _flatten(x) -> dict:
    if isinstance(x, MultiVector):
        return {hash(k): v for k, v in x.coeffs.items()}
    if isinstance(x, SkewEndomorphism):
        return x.flat()
    if hasattr(x, "flat"):
        return x.flat()
    return to_sparse(np.asarray(x, dtype=object).reshape(-1))


def _kernel_of_columns(ambient: SubalgebraSO, cols: list[dict]) -> SubalgebraSO:
    keys = sorted({k for c in cols for k in c}, key=repr)
    index = {k: i for i, k in enumerate(keys)}
    rows: list[dict] = [dict() for _ in keys]
    for j, c in enumerate(cols):
        for k, v in c.items():
            rows[index[k]][j] = v
    sols = nullspace(rows, len(cols))
    return SubalgebraSO(ambient.space, [ambient.element([s.get(j, 0) for j in range(len(cols))]) for s in sols])


def annihilator(ambient: SubalgebraSO, t) -> SubalgebraSO:
    """{xi in ambient : xi · t = 0}."""
    cols = [_flatten(so_action(b, t)) for b in ambient.basis]
    return _kernel_of_columns(ambient, cols)


def centralizer(ambient: SubalgebraSO, elems) -> SubalgebraSO:
    elems = elems.basis if isinstance(elems, SubalgebraSO) else [as_endo(e) for e in elems]
    cols = []
    for b in ambient.basis:
        d = {}
        for i, e in enumerate(elems):
            for k, v in b.bracket(e).flat().items():
                d[(i, k)] = v
        cols.append(d)
    return _kernel_of_columns(ambient, cols)


def fixed_vectors(alg: SubalgebraSO) -> Subspace:
    """Common kernel of all elements."""
    n = alg.space.dim
    rows = [to_sparse(b.matrix[i]) for b in alg.basis for i in range(n)]
    return Subspace(alg.space, [from_sparse(v, n) for v in nullspace(rows, n)])


def image_space(alg: SubalgebraSO) -> Subspace:
    """Span of all ``xi(v)``; the orthogonal complement of the fixed vectors."""
    n = alg.space.dim
    return Subspace(alg.space, [b.matrix[:, j] for b in alg.basis for j in range(n)])


# ----------------------------------------------------------------------------
# abstract Lie algebras


class AbstractLieAlgebra:
    """Lie algebra given by structure constants on a labelled basis.

    ``brackets`` maps ``(i, j)`` to ``{k: c}`` meaning ``[x_i, x_j] = Σ c x_k``;
    only one of ``(i, j)``/``(j, i)`` needs to be supplied.
    """

    def __init__(self, labels: Sequence[str], brackets: dict):
        self.labels = tuple(labels)
        self.dim = len(self.labels)
        table: dict = {}
        for (i, j), val in brackets.items():
            i, j = self._idx(i), self._idx(j)
            val = {self._idx(k): Fraction(v) for k, v in val.items() if v}
            if i == j:
                if val:
                    raise ValueError("[x, x] must vanish")
                continue
            if (j, i) in table and table[(j, i)] != {k: -v for k, v in val.items()}:
                raise ValueError(f"inconsistent antisymmetry for ({i}, {j})")
            if val:
                table[(i, j)] = val
                table[(j, i)] = {k: -v for k, v in val.items()}
        self._table = table

    def _idx(self, i) -> int:
        return self.labels.index(i) if isinstance(i, str) else int(i)

    @classmethod
    def from_dense(cls, labels, c) -> "AbstractLieAlgebra":
        c = np.asarray(c, dtype=object)
        n = len(labels)
        br = {}
        for i in range(n):
            for j in range(i + 1, n):
                br[(i, j)] = {k: c[i, j, k] for k in range(n) if c[i, j, k]}
        return cls(labels, br)

    def structure_constants(self) -> np.ndarray:
        n = self.dim
        c = qzeros((n, n, n))
        for (i, j), val in self._table.items():
            for k, v in val.items():
                c[i, j, k] = v
        return c

    def bracket_basis(self, i, j) -> dict:
        return dict(self._table.get((self._idx(i), self._idx(j)), {}))

    def bracket(self, x: dict, y: dict) -> dict:
        """Bracket of sparse coefficient vectors."""
        out: dict = {}
        for i, a in x.items():
            for j, b in y.items():
                for k, v in self._table.get((i, j), {}).items():
                    w = out.get(k, 0) + a * b * v
                    if w:
                        out[k] = w
                    else:
                        out.pop(k, None)
        return out

    def vector(self, spec) -> dict:
        """Sparse vector from ``{label: coeff}``."""
        return {self._idx(k): Fraction(v) for k, v in spec.items() if v}

    def ad(self, x: dict) -> np.ndarray:
        n = self.dim
        m = qzeros((n, n))
        for j in range(n):
            for k, v in self.bracket(x, {j: Fraction(1)}).items():
                m[k, j] = v
        return m

    def ad_matrices(self) -> list[np.ndarray]:
        return [self.ad({i: Fraction(1)}) for i in range(self.dim)]

    def killing(self) -> np.ndarray:
        if self.dim == 0:
            return qzeros((0, 0))
        ads = np.array(self.ad_matrices(), dtype=object)
        return qeinsum("iab,jba->ij", ads, ads)

    def jacobi_residual(self):
        """First basis triple violating Jacobi, or None."""
        n = self.dim
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(j + 1, n):
                    x, y, z = ({i: Fraction(1)}, {j: Fraction(1)}, {k: Fraction(1)})
                    s: dict = {}
                    for a, b, c in ((x, y, z), (y, z, x), (z, x, y)):
                        for key, v in self.bracket(self.bracket(a, b), c).items():
                            s[key] = s.get(key, 0) + v
                    if any(s.values()):
                        return (self.labels[i], self.labels[j], self.labels[k])
        return None

    def jacobi_ok(self) -> bool:
        return self.jacobi_residual() is None

    def is_abelian(self) -> bool:
        return not self._table

    def derived(self, basis: list[dict] | None = None) -> list[dict]:
        """Echelon basis of [V, V] for V spanned by ``basis`` (default: all)."""
        if basis is None:
            basis = [{i: Fraction(1)} for i in range(self.dim)]
        ech = Echelon()
        for a in range(len(basis)):
            for b in range(a + 1, len(basis)):
                ech.add(self.bracket(basis[a], basis[b]))
        return ech.rows()

    def derived_series(self) -> list[list[dict]]:
        series = [[{i: Fraction(1)} for i in range(self.dim)]]
        while True:
            nxt = self.derived(series[-1])
            series.append(nxt)
            if len(nxt) == len(series[-2]) or not nxt:
                return series

    def lower_central_series(self) -> list[list[dict]]:
        full = [{i: Fraction(1)} for i in range(self.dim)]
        series = [full]
        while True:
            ech = Echelon()
            for a in full:
                for b in series[-1]:
                    ech.add(self.bracket(a, b))
            nxt = ech.rows()
            series.append(nxt)
            if len(nxt) == len(series[-2]) or not nxt:
                return series

    def center(self) -> list[dict]:
        n = self.dim
        rows = []
        for j in range(n):
            # coefficient of x_k in [sum c_i x_i, x_j]
            per_k: dict = {}
            for i in range(n):
                for k, v in self._table.get((i, j), {}).items():
                    per_k.setdefault(k, {})[i] = v
            rows.extend(per_k.values())
        return Echelon(nullspace(rows, n)).rows()

    def subalgebra(self, vectors: Sequence[dict], labels: Sequence[str] | None = None) -> "AbstractLieAlgebra":
        """Structure constants of the span of ``vectors`` in that exact basis."""
        vectors = [dict(v) for v in vectors]
        k = len(vectors)
        labels = labels or [f"y{i + 1}" for i in range(k)]
        # express brackets in the given basis: solve sum a_m v_m = w
        keys = sorted({key for v in vectors for key in v})
        br = {}
        for a in range(k):
            for b in range(a + 1, k):
                w = self.bracket(vectors[a], vectors[b])
                coords = _coords_in(vectors, w, keys)
                if coords is None:
                    raise ValueError("vectors do not span a subalgebra")
                br[(a, b)] = coords
        return AbstractLieAlgebra(labels, br)

    def __repr__(self) -> str:
        return f"AbstractLieAlgebra(dim={self.dim}, labels={list(self.labels)})"

    def format_vector(self, v: dict) -> str:
        from .rational import fmt

        if not v:
            return "0"
        parts = []
        for k in sorted(v):
            c = v[k]
            lab = self.labels[k]
            parts.append(lab if c == 1 else ("-" + lab if c == -1 else f"{fmt(c)}*{lab}"))
        return " + ".join(parts).replace("+ -", "- ")


def _coords_in(vectors: list[dict], w: dict, keys: list) -> dict | None:
    """Solve ``sum a_m vectors[m] = w``; returns {m: a_m} or None."""
    from .exact import solve

    keys = sorted(set(keys) | set(w))
    rows = [{m: v[key] for m, v in enumerate(vectors) if key in v} for key in keys]
    rhs = [w.get(key, 0) for key in keys]
    sol = solve(rows, rhs, len(vectors))
    if sol is None:
        return None
    # verify (solve returns a particular solution; vectors are independent here)
    return {m: c for m, c in sol.items() if c}


def span_equal(a: Sequence[dict], b: Sequence[dict]) -> bool:
    ea, eb = Echelon(a), Echelon(b)
    return ea.rank == eb.rank and all(eb.contains(v) for v in a)


# ----------------------------------------------------------------------------
# reports and identification


@dataclass
class StructureReport:
    killing: np.ndarray
    killing_signature: tuple[int, int, int]
    derived_series: list[int]
    lower_central_series: list[int]
    center_dim: int
    jacobi_ok: bool

    def as_dict(self) -> dict:
        from .rational import fmt

        return {
            "killing": [[fmt(x) for x in row] for row in self.killing],
            "killing_signature": {"positive": self.killing_signature[0], "negative": self.killing_signature[1],
                                  "zero": self.killing_signature[2]},
            "derived_series": self.derived_series,
            "lower_central_series": self.lower_central_series,
            "center_dim": self.center_dim,
            "jacobi_ok": self.jacobi_ok,
        }


def structure_report(L: AbstractLieAlgebra) -> StructureReport:
    K = L.killing()
    sig = inertia(K) if L.dim else (0, 0, 0)
    return StructureReport(
        killing=K,
        killing_signature=sig,
        derived_series=[len(s) for s in L.derived_series()],
        lower_central_series=[len(s) for s in L.lower_central_series()],
        center_dim=len(L.center()),
        jacobi_ok=L.jacobi_ok(),
    )


LABELS = ("so3", "so12", "heisenberg3", "abelian", "solvable", "semisimple_sum", "direct_sum", "unknown")


@dataclass
class LieClassification:
    """Identification of a Lie algebra with supporting evidence.

    ``label`` is one of :data:`LABELS`; ``name`` is a readable description
    such as ``"so12+R^2"``; ``components`` lists the labels of the
    indecomposable ideals found.
    """

    label: str
    name: str
    evidence: dict = field(default_factory=dict)
    components: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"label": self.label, "name": self.name, "components": list(self.components), "evidence": self.evidence}


def classify_dim3(L: AbstractLieAlgebra) -> LieClassification:
    """Identify a 3-dimensional real Lie algebra from its Killing form."""
    if L.dim != 3:
        raise DimensionError(f"classify_dim3 needs dimension 3, got {L.dim}")
    rep = structure_report(L)
    pos, neg, zero = rep.killing_signature
    ev = {
        "killing_signature": [pos, neg, zero],
        "derived_series": rep.derived_series,
        "lower_central_series": rep.lower_central_series,
        "center_dim": rep.center_dim,
        "jacobi_ok": rep.jacobi_ok,
    }
    if not rep.jacobi_ok:
        return LieClassification("unknown", "not a Lie algebra", ev)
    if zero == 0:
        if neg == 3:
            return LieClassification("so3", "so3", ev)
        return LieClassification("so12", "so12", ev)
    if L.is_abelian():
        return LieClassification("abelian", "R^3", ev)
    lcs = rep.lower_central_series
    if zero == 3 and rep.center_dim == 1 and lcs[1] == 1 and lcs[2] == 0:
        return LieClassification("heisenberg3", "heisenberg3", ev)
    if rep.derived_series[-1] == 0:
        return LieClassification("solvable", "solvable3", ev)
    return LieClassification("unknown", "unknown3", ev)


def _heisenberg_dim(L: AbstractLieAlgebra, rep: StructureReport) -> bool:
    lcs = rep.lower_central_series
    return (L.dim % 2 == 1 and rep.center_dim == 1 and len(lcs) >= 3 and lcs[1] == 1 and lcs[2] == 0)


def classify(L: AbstractLieAlgebra, seed: int = 0) -> LieClassification:
    """Identify direct sums of so3, so12, Heisenberg and abelian ideals.

    Ideals are separated by primary decomposition of a random element of the
    commutant of the adjoint representation.  Anything that does not split
    into recognisable pieces is reported as solvable/semisimple/unknown with
    its Killing data.
    """
    if L.dim == 0:
        return LieClassification("abelian", "0", {"dim": 0})
    rep = structure_report(L)
    ev = {"dim": L.dim, **rep.as_dict()}
    ev.pop("killing")
    if L.is_abelian():
        return LieClassification("abelian", f"R^{L.dim}", ev, ["abelian"])
    if L.dim == 3:
        c = classify_dim3(L)
        c.components = [c.label]
        return c
    if _heisenberg_dim(L, rep):
        return LieClassification("heisenberg3" if L.dim == 3 else "solvable", f"heisenberg{L.dim}", ev,
                                 [f"heisenberg{L.dim}"])
    pieces = decompose_module(L.ad_matrices(), seed=seed)
    if len(pieces) > 1:
        comps = []
        abelian_dim = 0
        for basis in pieces:
            sub = L.subalgebra(basis)
            c = classify(sub, seed)
            if c.label == "abelian":
                abelian_dim += sub.dim
            else:
                comps.append(c)
        names = sorted(c.name for c in comps)
        if abelian_dim:
            names.append(f"R^{abelian_dim}")
        labels = [c.label for c in comps] + (["abelian"] if abelian_dim else [])
        if any(lab == "unknown" for lab in labels):
            label = "unknown"
        elif all(lab in ("so3", "so12", "semisimple_sum") for lab in labels):
            label = "semisimple_sum"
        elif all(lab in ("abelian", "heisenberg3", "solvable") for lab in labels):
            label = "solvable"
        else:
            label = "direct_sum"
        return LieClassification(label, "+".join(names), ev, labels)
    pos, neg, zero = rep.killing_signature
    if zero == 0:
        # simple of dimension > 3: outside the recognised list
        return LieClassification("unknown", f"simple{L.dim}({pos},{neg})", ev, ["unknown"])
    if rep.derived_series[-1] == 0:
        return LieClassification("solvable", f"solvable{L.dim}", ev, ["solvable"])
    return LieClassification("unknown", f"unknown{L.dim}", ev, ["unknown"])


# ----------------------------------------------------------------------------
# module decomposition by commutant elements


def _char_poly_factors(m: np.ndarray):
    import sympy

    S = sympy.Matrix(m.tolist())
    lam = sympy.Symbol("lam")
    poly = S.charpoly(lam)
    _, factors = sympy.factor_list(poly.as_expr(), lam)
    return lam, [(sympy.Poly(f, lam), mult) for f, mult in factors]


def _poly_of_matrix(poly, m: np.ndarray) -> np.ndarray:
    n = m.shape[0]
    out = qzeros((n, n))
    for c in poly.all_coeffs():
        out = qmatmul(out, m)
        c = Fraction(int(c.p), int(c.q))
        for i in range(n):
            out[i, i] += c
    return out


def primary_components(m: np.ndarray) -> list[list[np.ndarray]]:
    """Bases of the primary components ``ker f(m)^k`` over Q."""
    n = m.shape[0]
    _, factors = _char_poly_factors(m)
    comps = []
    for f, mult in factors:
        fm = _poly_of_matrix(f, m)
        power = fm
        for _ in range(mult - 1):
            power = qmatmul(power, fm)
        ker = nullspace([to_sparse(power[i]) for i in range(n)], n)
        comps.append([from_sparse(v, n) for v in ker])
    return comps


def _commutant(mats: list[np.ndarray], n: int, metric: np.ndarray | None) -> list[np.ndarray]:
    rows = []
    # unknown X (n×n) flattened at index a*n+b; [X, A] = 0
    for A in mats:
        for i in range(n):
            for j in range(n):
                r: dict = {}
                for k in range(n):
                    # (XA)_{ij} = sum_k X_{ik} A_{kj}; (AX)_{ij} = sum_k A_{ik} X_{kj}
                    if A[k, j]:
                        r[i * n + k] = r.get(i * n + k, 0) + A[k, j]
                    if A[i, k]:
                        r[k * n + j] = r.get(k * n + j, 0) - A[i, k]
                r = {key: v for key, v in r.items() if v}
                if r:
                    rows.append(r)
    if metric is not None:
        # self-adjoint: G X - X^T G = 0
        for i in range(n):
            for j in range(i + 1, n):
                r = {}
                for k in range(n):
                    if metric[i, k]:
                        r[k * n + j] = r.get(k * n + j, 0) + metric[i, k]
                    if metric[k, j]:
                        r[k * n + i] = r.get(k * n + i, 0) - metric[k, j]
                r = {key: v for key, v in r.items() if v}
                if r:
                    rows.append(r)
    sols = nullspace(rows, n * n)
    return [from_sparse(s, n * n).reshape(n, n) for s in sols]


def decompose_module(mats: Sequence[np.ndarray], metric: np.ndarray | None = None, seed: int = 0,
                     tries: int = 6) -> list[list[dict]]:
    """Split a module into invariant pieces via the commutant.

    ``mats`` act on Q^n.  With ``metric`` given only self-adjoint commutant
    elements are used, so the pieces are mutually orthogonal and
    nondegenerate.  Returns bases (sparse vectors in ambient coordinates).
    The split is heuristic in the sense that a decomposition needing
    irrational subspaces is not found.
    """
    mats = [np.asarray(m, dtype=object) for m in mats]
    n = mats[0].shape[0] if mats else (metric.shape[0] if metric is not None else 0)
    if n == 0:
        return []
    rng = random.Random(seed)
    return _decompose(mats, metric, n, rng, tries, [{i: Fraction(1)} for i in range(n)])


def _decompose(mats, metric, n, rng, tries, ambient_basis) -> list[list[dict]]:
    if n <= 1:
        return [ambient_basis]
    comm = _commutant(mats, n, metric)
    if len(comm) <= 1:
        return [ambient_basis]
    best = None
    candidates = list(comm[1:]) if len(comm) > 1 else []
    for _ in range(tries):
        S = sum((c * Fraction(rng.randint(-9, 9), rng.randint(1, 3)) for c in comm), np.zeros((n, n), dtype=object))
        candidates.append(S)
    for S in candidates:
        comps = primary_components(S)
        if len(comps) > 1:
            best = comps
            break
    if best is None:
        return [ambient_basis]
    out = []
    for comp in best:
        k = len(comp)
        ech = Echelon(to_sparse(v) for v in comp)
        rows = ech.rows()
        piv = ech.pivots
        # restricted matrices in the echelon basis: coords of A v are (A v)[pivots]
        restricted = []
        for A in mats:
            R = qzeros((k, k))
            for j, r in enumerate(rows):
                v = from_sparse(r, n)
                Av = qmatmul(A, v)
                for i, c in enumerate(piv):
                    R[i, j] = Av[c]
            restricted.append(R)
        sub_metric = None
        if metric is not None:
            B = np.array([from_sparse(r, n) for r in rows], dtype=object).T
            sub_metric = qmatmul(qmatmul(B.T, metric), B)
        amb = []
        for r in rows:
            vec: dict = {}
            for i, c in r.items():
                for key, val in ambient_basis[i].items():
                    vec[key] = vec.get(key, 0) + c * val
            amb.append({key: v for key, v in vec.items() if v})
        out.extend(_decompose(restricted, sub_metric, k, rng, tries, amb))
    return out
