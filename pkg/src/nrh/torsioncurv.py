"""Torsion 3-forms, curvature maps and their algebraic identities.

Sign constants
--------------
With the storage conventions of :mod:`nrh.mlinalg` the curvature of
``∇ = ∇^g + ½T`` is

    R(X,Y) = R^g(X,Y) + COMMUTATOR_COEFF·[T(X),T(Y)] + NESTED_COEFF·T(T(X)Y)

and the first Bianchi identity reads ``Σ_cyc R(X,Y)Z = BIANCHI_SIGN·σ_T(X,Y,Z)``.
The coefficients were fixed by the bi-invariant Lie group check (the
connection with torsion ``−[X,Y]`` is flat) and are pinned by tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from .errors import GradeError, InternalError
from .exact import first_nonzero, is_zero, nullspace, qeinsum, qzeros, solve
from .liealg import SubalgebraSO
from .mlinalg import MultiVector, SkewEndomorphism, Space, as_endo, format_multivector, so_action
from .rational import q

COMMUTATOR_COEFF = Fraction(-1, 4)
NESTED_COEFF = Fraction(1, 2)
BIANCHI_SIGN = 1


class TorsionTensor:
    """Totally skew torsion stored as a 3-vector (metric-dual 3-form)."""

    def __init__(self, three_form: MultiVector):
        if three_form.grade != 3:
            raise GradeError("torsion must be a 3-vector")
        self.space = three_form.space
        self.three_form = three_form
        g = self.space
        self._lowered = three_form.lowered() if g.dim >= 3 else qzeros((g.dim,) * 3)
        # T(e_a, e_b) = vectors[a, b, :]
        self._vectors = qeinsum("abd,dc->abc", self._lowered, g.inverse_metric)

    @classmethod
    def zero(cls, space: Space) -> "TorsionTensor":
        return cls(MultiVector.zero(space, 3))

    @classmethod
    def from_lowered(cls, space: Space, arr) -> "TorsionTensor":
        return cls(MultiVector.from_lowered(space, arr))

    def lowered(self) -> np.ndarray:
        """Covariant array ``g(T(e_a, e_b), e_c)``."""
        return self._lowered

    def vector_array(self) -> np.ndarray:
        return self._vectors

    def __call__(self, x, y) -> np.ndarray:
        return qeinsum("a,b,abc->c", np.asarray(x, dtype=object), np.asarray(y, dtype=object), self._vectors)

    def endo(self, x) -> SkewEndomorphism:
        """``T(X)`` as the skew endomorphism ``Y ↦ T(X, Y)``."""
        m = qeinsum("a,abc->cb", np.asarray(x, dtype=object), self._vectors)
        return SkewEndomorphism(self.space, m, check=False)

    def act_by(self, xi) -> "TorsionTensor":
        return TorsionTensor(so_action(xi, self.three_form))

    def flat(self) -> dict:
        return dict(self.three_form.coeffs)

    def is_zero(self) -> bool:
        return self.three_form.is_zero()

    def __add__(self, other: "TorsionTensor") -> "TorsionTensor":
        return TorsionTensor(self.three_form + other.three_form)

    def __sub__(self, other: "TorsionTensor") -> "TorsionTensor":
        return TorsionTensor(self.three_form - other.three_form)

    def __mul__(self, c) -> "TorsionTensor":
        return TorsionTensor(self.three_form * c)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, TorsionTensor):
            return NotImplemented
        return self.three_form == other.three_form

    def __repr__(self) -> str:
        return f"TorsionTensor({format_multivector(self.three_form)})"


class CurvatureTensor:
    """Skew bilinear map ``Λ²V → so(V)`` stored as a dense 4-index array.

    ``array[i, j]`` is the matrix of ``R(e_i, e_j)``.
    """

    def __init__(self, space: Space, array, check: bool = True):
        arr = np.asarray(array, dtype=object)
        n = space.dim
        if arr.shape != (n, n, n, n):
            raise ValueError("curvature array must have shape (n, n, n, n)")
        if check:
            for i in range(n):
                for j in range(n):
                    if any(arr[i, j].reshape(-1) + arr[j, i].reshape(-1)):
                        raise ValueError("curvature must be skew in its two arguments")
                    if i < j:
                        SkewEndomorphism(space, arr[i, j])
        self.space = space
        self.array = arr

    @classmethod
    def zero(cls, space: Space) -> "CurvatureTensor":
        n = space.dim
        return cls(space, qzeros((n, n, n, n)), check=False)

    @classmethod
    def from_values(cls, space: Space, values: dict) -> "CurvatureTensor":
        """From ``{(i, j): value}`` (labels or indices, value bivector/endo).

        Unlisted pairs are zero; ``(j, i)`` is filled in by skewness.
        Listing both orders inconsistently is an error.
        """
        n = space.dim
        arr = qzeros((n, n, n, n))
        seen: dict = {}
        for (i, j), val in values.items():
            i = space.index(i) if isinstance(i, str) else int(i)
            j = space.index(j) if isinstance(j, str) else int(j)
            m = as_endo(val).matrix
            if i == j:
                if any(m.reshape(-1)):
                    raise ValueError("R(X, X) must vanish")
                continue
            key = (min(i, j), max(i, j))
            m = m if i < j else -m
            if key in seen and not np.array_equal(seen[key], m):
                raise ValueError(f"inconsistent values for pair {key}")
            seen[key] = m
        for (i, j), m in seen.items():
            arr[i, j] = m
            arr[j, i] = -m
        return cls(space, arr, check=False)

    @classmethod
    def from_function(cls, space: Space, fn) -> "CurvatureTensor":
        """``fn(i, j)`` returns a bivector/endomorphism (or None) for i < j."""
        vals = {}
        for i, j in combinations(range(space.dim), 2):
            v = fn(i, j)
            if v is not None:
                vals[(i, j)] = v
        return cls.from_values(space, vals)

    @classmethod
    def form_times(cls, form, endo) -> "CurvatureTensor":
        """``(X, Y) ↦ φ(X, Y)·B`` for a 2-form ``φ`` (bivector/endo) and endo ``B``.

        With ``form = endo = θ`` this is ``θ∘θ``.
        """
        f = as_endo(form)
        b = as_endo(endo)
        space = f.space
        # φ(e_i, e_j) = g(f e_i, e_j)
        phi = qeinsum("ki,kj->ij", f.matrix, space.metric)
        arr = qeinsum("ij,rs->ijrs", phi, b.matrix)
        return cls(space, arr, check=False)

    @classmethod
    def constant(cls, space: Space, c=1) -> "CurvatureTensor":
        """``R(X, Y) = c·X∧Y``."""
        c = q(c)
        return cls.from_function(space, lambda i, j: space.blade(i, j) * c)

    def __call__(self, x, y) -> SkewEndomorphism:
        m = qeinsum("i,j,ijrs->rs", np.asarray(x, dtype=object), np.asarray(y, dtype=object), self.array)
        return SkewEndomorphism(self.space, m, check=False)

    def value(self, i, j) -> SkewEndomorphism:
        i = self.space.index(i) if isinstance(i, str) else i
        j = self.space.index(j) if isinstance(j, str) else j
        return SkewEndomorphism(self.space, self.array[i, j], check=False)

    def values(self) -> list[SkewEndomorphism]:
        return [self.value(i, j) for i, j in combinations(range(self.space.dim), 2)]

    def image(self) -> SubalgebraSO:
        """Linear span of all values (not closed under brackets by itself)."""
        return SubalgebraSO(self.space, self.values())

    def lowered(self) -> np.ndarray:
        """``g(R(e_x, e_y)e_z, e_w)`` as an array ``[x, y, z, w]``."""
        return qeinsum("xyrz,rw->xyzw", self.array, self.space.metric)

    def act_by(self, xi) -> "CurvatureTensor":
        """``(ξ·R)(X,Y) = [ξ, R(X,Y)] − R(ξX, Y) − R(X, ξY)``."""
        m = as_endo(xi).matrix
        a = self.array
        out = (qeinsum("rt,xyts->xyrs", m, a) - qeinsum("xyrt,ts->xyrs", a, m)
               - qeinsum("ax,ayrs->xyrs", m, a) - qeinsum("by,xbrs->xyrs", m, a))
        return CurvatureTensor(self.space, out, check=False)

    def flat(self) -> dict:
        n = self.space.dim
        out = {}
        for i, j in combinations(range(n), 2):
            for (r, s), v in np.ndenumerate(self.array[i, j]):
                if v:
                    out[(i, j, r, s)] = v
        return out

    def is_zero(self) -> bool:
        return is_zero(self.array)

    def __add__(self, other: "CurvatureTensor") -> "CurvatureTensor":
        self.space.check(other.space)
        return CurvatureTensor(self.space, self.array + other.array, check=False)

    def __sub__(self, other: "CurvatureTensor") -> "CurvatureTensor":
        self.space.check(other.space)
        return CurvatureTensor(self.space, self.array - other.array, check=False)

    def __neg__(self) -> "CurvatureTensor":
        return CurvatureTensor(self.space, -self.array, check=False)

    def __mul__(self, c) -> "CurvatureTensor":
        return CurvatureTensor(self.space, self.array * q(c), check=False)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, CurvatureTensor):
            return NotImplemented
        return self.space == other.space and np.array_equal(self.array, other.array)

    def __repr__(self) -> str:
        parts = []
        for i, j in combinations(range(self.space.dim), 2):
            v = self.value(i, j)
            if not v.is_zero():
                parts.append(f"R({self.space.labels[i]},{self.space.labels[j]}) = "
                             f"{format_multivector(v.bivector())}")
        return "CurvatureTensor(" + ("; ".join(parts) or "0") + ")"


# ----------------------------------------------------------------------------
# identities


def _cyclic(arr: np.ndarray) -> np.ndarray:
    """Cyclic sum over the first three indices."""
    return arr + np.transpose(arr, (1, 2, 0, 3)) + np.transpose(arr, (2, 0, 1, 3))


def sigma_vectors(T: TorsionTensor) -> np.ndarray:
    """``Σ_cyc T(T(X,Y),Z)`` as an array ``[x, y, z, :]``."""
    d = T.vector_array()
    return _cyclic(qeinsum("xym,mzc->xyzc", d, d))


def sigma_of(T: TorsionTensor) -> MultiVector:
    """The 4-form ``σ_T(X,Y,Z,W) = g(Σ_cyc T(T(X,Y),Z), W)`` as a 4-vector."""
    n = T.space.dim
    if n < 4:
        return MultiVector.zero(T.space, 4)
    d = T.vector_array()
    low = _cyclic(qeinsum("xym,mzw->xyzw", d, T.lowered()))
    for perm in ((1, 0, 2, 3), (0, 2, 1, 3), (0, 1, 3, 2)):
        if not np.array_equal(low, -np.transpose(low, perm)):
            raise InternalError("σ_T is not totally antisymmetric")
    return MultiVector.from_lowered(T.space, low)


def _torsion_or_zero(T, space):
    return TorsionTensor.zero(space) if T is None else T


def bianchi_residual(R: CurvatureTensor, T: TorsionTensor | None = None, sign: int = BIANCHI_SIGN) -> np.ndarray:
    """``Σ_cyc R(X,Y)Z − sign·Σ_cyc T(T(X,Y),Z)`` as an array ``[x, y, z, :]``."""
    T = _torsion_or_zero(T, R.space)
    R.space.check(T.space)
    rz = np.transpose(R.array, (0, 1, 3, 2))  # [x, y, z, r]
    return _cyclic(rz) - sigma_vectors(T) * sign


def first_bianchi_holds(R, T=None, sign: int = BIANCHI_SIGN) -> bool:
    return is_zero(bianchi_residual(R, T, sign))


def pair_symmetry_violation(R: CurvatureTensor):
    """First index tuple (x, y, z, w) violating pair symmetry, or None."""
    low = R.lowered()
    diff = low - np.transpose(low, (2, 3, 0, 1))
    return first_nonzero(diff)


def pair_symmetry_check(R: CurvatureTensor) -> bool:
    """``g(R(X,Y)Z, W) = g(R(Z,W)X, Y)`` on all basis tuples."""
    return pair_symmetry_violation(R) is None


def second_bianchi_residual(R: CurvatureTensor, T: TorsionTensor | None = None) -> np.ndarray:
    """``Σ_cyc R(T(X,Y), Z)`` as an array ``[x, y, z, :, :]``."""
    T = _torsion_or_zero(T, R.space)
    a = qeinsum("xym,mzrs->xyzrs", T.vector_array(), R.array)
    return a + np.transpose(a, (1, 2, 0, 3, 4)) + np.transpose(a, (2, 0, 1, 3, 4))


def curvature_from_lc(Rg: CurvatureTensor, T: TorsionTensor) -> CurvatureTensor:
    """Curvature of ``∇^g + ½T`` from the Levi-Civita curvature."""
    Rg.space.check(T.space)
    d = T.vector_array()
    endo = np.transpose(d, (0, 2, 1))  # endo[x] = matrix of T(e_x)
    comm = qeinsum("xrt,yts->xyrs", endo, endo)
    comm = comm - np.transpose(comm, (1, 0, 2, 3))
    nested = qeinsum("xym,mrs->xyrs", d, endo)
    arr = Rg.array + comm * COMMUTATOR_COEFF + nested * NESTED_COEFF
    return CurvatureTensor(Rg.space, arr, check=False)


# ----------------------------------------------------------------------------
# solution spaces


@dataclass
class CurvatureSpace:
    """Affine space of curvature tensors with values in ``algebra``."""

    algebra: SubalgebraSO
    torsion: TorsionTensor
    particular: CurvatureTensor | None
    homogeneous_basis: list = field(default_factory=list)

    @property
    def linear_dim(self) -> int:
        return len(self.homogeneous_basis)

    @property
    def is_empty(self) -> bool:
        return self.particular is None

    @property
    def affine_dim(self) -> int | None:
        """Dimension of the solution set, or None when it is empty."""
        return None if self.particular is None else self.linear_dim

    def element(self, coords) -> CurvatureTensor:
        if self.particular is None:
            raise ValueError("no curvature tensor satisfies the constraints")
        out = self.particular
        for c, h in zip(coords, self.homogeneous_basis):
            out = out + h * c
        return out

    def image_span(self) -> SubalgebraSO:
        gens = []
        if self.particular is not None:
            gens += self.particular.values()
        for h in self.homogeneous_basis:
            gens += h.values()
        return SubalgebraSO(self.algebra.space, gens)


def curvature_space(g: SubalgebraSO, T: TorsionTensor | None = None, sign: int = BIANCHI_SIGN) -> CurvatureSpace:
    """All ``R ∈ Λ²⊗g`` with ``Σ_cyc R(X,Y)Z = sign·σ_T(X,Y,Z)``."""
    space = g.space
    T = _torsion_or_zero(T, space)
    n = space.dim
    pairs = list(combinations(range(n), 2))
    pair_index = {p: k for k, p in enumerate(pairs)}
    basis = [b.matrix for b in g.basis]
    m = len(basis)
    nvars = len(pairs) * m
    sv = sigma_vectors(T)
    rows, rhs = [], []
    for x, y, z in combinations(range(n), 3):
        # R(x,y)z + R(y,z)x + R(z,x)y with R(z,x) = −R(x,z)
        terms = ((pair_index[(x, y)], z, 1), (pair_index[(y, z)], x, 1), (pair_index[(x, z)], y, -1))
        for r in range(n):
            row: dict = {}
            for pk, col, s in terms:
                for b, mat in enumerate(basis):
                    v = mat[r, col]
                    if v:
                        key = pk * m + b
                        row[key] = row.get(key, 0) + s * v
            row = {k: v for k, v in row.items() if v}
            target = sv[x, y, z, r] * sign
            if row or target:
                rows.append(row)
                rhs.append(target)

    def tensor(sol: dict) -> CurvatureTensor:
        arr = qzeros((n, n, n, n))
        for key, c in sol.items():
            pk, b = divmod(key, m)
            i, j = pairs[pk]
            arr[i, j] = arr[i, j] + basis[b] * c
            arr[j, i] = -arr[i, j]
        return CurvatureTensor(space, arr, check=False)

    if m == 0:
        ok = all(not t for t in rhs)
        return CurvatureSpace(g, T, CurvatureTensor.zero(space) if ok else None, [])
    part = solve(rows, rhs, nvars)
    particular = tensor(part) if part is not None else None
    homog = [tensor(s) for s in nullspace(rows, nvars)]
    return CurvatureSpace(g, T, particular, homog)


def berger_check(g: SubalgebraSO, T: TorsionTensor | None = None) -> bool:
    """True iff the curvature tensors with torsion ``T`` and values in g span g."""
    cs = curvature_space(g, T)
    return cs.image_span() == g


@dataclass
class PMap:
    """Linear map ``ℝ^k → h`` given by its values on the basis."""

    values: list

    def __call__(self, x) -> SkewEndomorphism:
        out = SkewEndomorphism.zero(self.values[0].space)
        for c, v in zip(x, self.values):
            if c:
                out = out + v * c
        return out

    def cyclic_ok(self) -> bool:
        space = self.values[0].space
        n = space.dim
        for x, y, z in combinations(range(n), 3):
            s = Fraction(0)
            for a, b, c in ((x, y, z), (y, z, x), (z, x, y)):
                s += space.inner(self.values[a].matrix[:, b], space.basis_vector(c))
            if s:
                return False
        return True


def p_space(h: SubalgebraSO) -> list[PMap]:
    """Basis of ``{P : ℝ^k → h | Σ_cyc g(P(X)Y, Z) = 0}``."""
    space = h.space
    n = space.dim
    basis = h.basis
    m = len(basis)
    if m == 0:
        return []
    # unknown P(e_a) = Σ_b c[a*m + b] basis[b]
    low = [qeinsum("rs,rt->ts", b.matrix, space.metric) for b in basis]  # low[b][z, y] = g(B e_y, e_z)
    rows = []
    for x, y, z in combinations(range(n), 3):
        row: dict = {}
        for a, b_, c in ((x, y, z), (y, z, x), (z, x, y)):
            for b in range(m):
                v = low[b][c, b_]
                if v:
                    row[a * m + b] = row.get(a * m + b, 0) + v
        row = {k: v for k, v in row.items() if v}
        if row:
            rows.append(row)
    out = []
    for sol in nullspace(rows, n * m):
        vals = []
        for a in range(n):
            e = SkewEndomorphism.zero(space)
            for b in range(m):
                c = sol.get(a * m + b)
                if c:
                    e = e + basis[b] * c
            vals.append(e)
        out.append(PMap(vals))
    return out
