"""Exact pseudo-Euclidean multilinear algebra.

Conventions
-----------
* Matrices act on column vectors from the left.
* A k-vector ``e_{i1} ∧ ... ∧ e_{ik}`` is stored once, on its increasing
  index tuple.  Its dense form is the antisymmetrised tensor product without
  a 1/k! factor, so ``X ∧ Y = X⊗Y − Y⊗X``.
* k-vectors and k-forms are identified through the metric.  Storage is always
  contravariant; :meth:`MultiVector.lowered` gives the covariant array.
* Bivectors act as skew endomorphisms by ``(X∧Y)Z = g(X,Z)Y − g(Y,Z)X``.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations
from typing import Iterable, Sequence

import numpy as np

from .errors import GradeError, RankError, SpaceMismatch
from .exact import Echelon, from_sparse, inertia, is_zero, nullspace, qarray, qeinsum, qmatmul, qzeros, to_sparse
from .rational import q

MAX_GRADE = 4


def _perm_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation sorting ``seq`` (0 if there is a repeat)."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


class Space:
    """A real vector space with a nondegenerate symmetric rational metric."""

    def __init__(self, metric, labels: Sequence[str] | None = None, frame: str = "general"):
        g = qarray(metric)
        n = g.shape[0]
        if g.shape != (n, n) or n == 0:
            raise ValueError("metric must be a nonempty square matrix")
        if any(g[i, j] != g[j, i] for i in range(n) for j in range(n)):
            raise ValueError("metric must be symmetric")
        labels = tuple(labels) if labels is not None else tuple(f"e{i + 1}" for i in range(n))
        if len(labels) != n or len(set(labels)) != n:
            raise ValueError("need one distinct label per basis vector")
        if frame not in ("witt", "orthonormal", "general"):
            raise ValueError(f"unknown frame kind {frame!r}")
        self.metric = g
        self.metric.flags.writeable = False
        self.labels = labels
        self.frame = frame
        self.dim = n
        inv = _inverse(g)
        if inv is None:
            raise ValueError("metric is degenerate")
        self.inverse_metric = inv
        self.inverse_metric.flags.writeable = False
        self._index = {lab: i for i, lab in enumerate(labels)}

    # -- constructors -------------------------------------------------------

    @classmethod
    def witt(cls, n: int, labels: Sequence[str] | None = None) -> "Space":
        """Minkowski space R^{1,n+1} in a Witt basis (p, e_1..e_n, q)."""
        d = n + 2
        g = qzeros((d, d))
        g[0, d - 1] = g[d - 1, 0] = Fraction(1)
        for i in range(1, d - 1):
            g[i, i] = Fraction(1)
        if labels is None:
            labels = ["p"] + [f"e{i}" for i in range(1, n + 1)] + ["q"]
        return cls(g, labels, "witt")

    @classmethod
    def orthonormal(cls, signs: Sequence[int], labels: Sequence[str] | None = None) -> "Space":
        if any(s not in (1, -1) for s in signs):
            raise ValueError("orthonormal signs must be ±1")
        g = qzeros((len(signs), len(signs)))
        for i, s in enumerate(signs):
            g[i, i] = Fraction(s)
        return cls(g, labels, "orthonormal")

    @classmethod
    def euclidean(cls, n: int, labels: Sequence[str] | None = None) -> "Space":
        return cls.orthonormal([1] * n, labels)

    # -- basics ------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, Space):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.metric, other.metric)

    def __hash__(self) -> int:
        return hash((self.labels, tuple(self.metric.reshape(-1))))

    def __repr__(self) -> str:
        return f"Space(dim={self.dim}, frame={self.frame!r}, labels={list(self.labels)})"

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"no basis vector labelled {label!r}") from None

    def basis_vector(self, i: int | str) -> np.ndarray:
        if isinstance(i, str):
            i = self.index(i)
        v = qzeros(self.dim)
        v[i] = Fraction(1)
        return v

    def vector(self, coeffs) -> np.ndarray:
        """Vector from a coefficient list or a ``{label: coeff}`` dict."""
        if isinstance(coeffs, dict):
            v = qzeros(self.dim)
            for lab, c in coeffs.items():
                v[self.index(lab)] += q(c)
            return v
        v = qarray(coeffs)
        if v.shape != (self.dim,):
            raise ValueError("wrong vector length")
        return v

    def inner(self, x, y) -> Fraction:
        x = np.asarray(x, dtype=object)
        y = np.asarray(y, dtype=object)
        return sum((x[i] * self.metric[i, j] * y[j] for i in range(self.dim) for j in range(self.dim)
                    if x[i] and y[j] and self.metric[i, j]), Fraction(0))

    def lower(self, v) -> np.ndarray:
        return qmatmul(self.metric, v)

    def raise_(self, w) -> np.ndarray:
        return qmatmul(self.inverse_metric, w)

    def signature(self) -> tuple[int, int]:
        """(number of negative, number of positive) directions."""
        pos, neg, _ = inertia(self.metric)
        return neg, pos

    def is_lorentzian(self) -> bool:
        return self.signature()[0] == 1 and self.dim >= 2

    def check(self, other: "Space") -> None:
        if self != other:
            raise SpaceMismatch(f"{self!r} vs {other!r}")

    def blade(self, *labels) -> "MultiVector":
        """Basis blade from labels or indices, e.g. ``space.blade('p', 'e1')``."""
        idx = [self.index(l) if isinstance(l, str) else int(l) for l in labels]
        sign = _perm_sign(idx)
        if sign == 0:
            return MultiVector(self, len(idx), {})
        return MultiVector(self, len(idx), {tuple(sorted(idx)): Fraction(sign)})

    def vec(self, label_or_coeffs) -> "MultiVector":
        """Grade-1 multivector from a label or coefficients."""
        if isinstance(label_or_coeffs, str):
            return self.blade(label_or_coeffs)
        return MultiVector.from_vector(self, self.vector(label_or_coeffs))


def _inverse(m):
    n = m.shape[0]
    rows = []
    for i in range(n):
        r = to_sparse(m[i])
        r.update({n + i: Fraction(1)})
        rows.append(r)
    ech = Echelon(rows)
    if ech.pivots[:n] != list(range(n)) or ech.rank < n:
        return None
    inv = qzeros((n, n))
    for c, row in zip(ech.pivots, ech.rows()):
        if c >= n:
            return None
        for j, v in row.items():
            if j >= n:
                inv[c, j - n] = v
    return inv


# ----------------------------------------------------------------------------
# multivectors


class MultiVector:
    """Homogeneous element of the exterior algebra of a :class:`Space`."""

    __slots__ = ("space", "grade", "coeffs")

    def __init__(self, space: Space, grade: int, coeffs: dict | None = None):
        if grade < 0 or (grade > MAX_GRADE and coeffs):
            raise GradeError(f"grade {grade} outside 0..{MAX_GRADE}")
        clean = {}
        for key, c in (coeffs or {}).items():
            key = tuple(int(i) for i in key)
            if len(key) != grade or any(a >= b for a, b in zip(key, key[1:])):
                raise ValueError(f"index tuple {key} is not strictly increasing of length {grade}")
            if any(not 0 <= i < space.dim for i in key):
                raise ValueError(f"index tuple {key} out of range")
            c = q(c)
            if c:
                clean[key] = c
        self.space = space
        self.grade = grade
        self.coeffs = clean

    @classmethod
    def zero(cls, space: Space, grade: int) -> "MultiVector":
        return cls(space, grade, {})

    @classmethod
    def scalar(cls, space: Space, c) -> "MultiVector":
        return cls(space, 0, {(): c})

    @classmethod
    def from_vector(cls, space: Space, v) -> "MultiVector":
        return cls(space, 1, {(i,): x for i, x in enumerate(v)})

    @classmethod
    def from_dense(cls, space: Space, arr) -> "MultiVector":
        """Read the increasing-index components of an antisymmetric array."""
        arr = np.asarray(arr, dtype=object)
        k = arr.ndim
        coeffs = {}
        for idx in np.ndindex(arr.shape):
            if all(a < b for a, b in zip(idx, idx[1:])) and arr[idx] != 0:
                coeffs[idx] = arr[idx]
        return cls(space, k, coeffs)

    @classmethod
    def from_lowered(cls, space: Space, arr) -> "MultiVector":
        """Multivector whose covariant (lowered) array is ``arr``."""
        arr = np.asarray(arr, dtype=object)
        ginv = space.inverse_metric
        letters = "abcd"[: arr.ndim]
        out = arr
        for ax in range(arr.ndim):
            spec = letters.replace(letters[ax], "z")
            out = qeinsum(f"{letters[ax]}z,{spec}->{letters}", ginv, out)
        return cls.from_dense(space, out)

    # -- arithmetic --------------------------------------------------------

    def _same(self, other: "MultiVector") -> None:
        if not isinstance(other, MultiVector):
            raise TypeError("expected a MultiVector")
        self.space.check(other.space)
        if other.grade != self.grade:
            raise GradeError(f"grade {self.grade} vs {other.grade}")

    def __add__(self, other: "MultiVector") -> "MultiVector":
        self._same(other)
        c = dict(self.coeffs)
        for k, v in other.coeffs.items():
            c[k] = c.get(k, 0) + v
        return MultiVector(self.space, self.grade, c)

    def __neg__(self) -> "MultiVector":
        return MultiVector(self.space, self.grade, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other: "MultiVector") -> "MultiVector":
        return self + (-other)

    def __mul__(self, c) -> "MultiVector":
        c = q(c)
        return MultiVector(self.space, self.grade, {k: c * v for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __xor__(self, other: "MultiVector") -> "MultiVector":
        return wedge(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiVector):
            return NotImplemented
        return self.space == other.space and self.grade == other.grade and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.grade, frozenset(self.coeffs.items())))

    def is_zero(self) -> bool:
        return not self.coeffs

    def __repr__(self) -> str:
        if not self.coeffs:
            return f"MultiVector(0, grade={self.grade})"
        return f"MultiVector({format_multivector(self)})"

    # -- conversions -------------------------------------------------------

    def dense(self) -> np.ndarray:
        n, k = self.space.dim, self.grade
        arr = qzeros((n,) * k) if k else qzeros(())
        for key, c in self.coeffs.items():
            for perm in permutations(range(k)):
                idx = tuple(key[i] for i in perm)
                arr[idx] = c * _perm_sign(perm)
        return arr

    def lowered(self) -> np.ndarray:
        """Covariant array: the k-form metrically dual to this k-vector."""
        arr = self.dense()
        g = self.space.metric
        letters = "abcd"[: self.grade]
        for ax in range(self.grade):
            spec = letters.replace(letters[ax], "z")
            arr = qeinsum(f"{letters[ax]}z,{spec}->{letters}", g, arr)
        return arr

    def vector(self) -> np.ndarray:
        if self.grade != 1:
            raise GradeError("not a vector")
        v = qzeros(self.space.dim)
        for (i,), c in self.coeffs.items():
            v[i] = c
        return v

    def evaluate(self, *vectors) -> Fraction:
        """Value of the associated k-form on k vectors."""
        if len(vectors) != self.grade:
            raise GradeError("need one vector per slot")
        arr = self.lowered()
        for v in vectors:
            arr = np.tensordot(np.asarray(v, dtype=object), arr, axes=(0, 0))
        return Fraction(np.asarray(arr, dtype=object).reshape(()).item())


def wedge(a: MultiVector, b: MultiVector) -> MultiVector:
    a.space.check(b.space)
    k = a.grade + b.grade
    if k > a.space.dim:
        return MultiVector.zero(a.space, k)
    if k > MAX_GRADE:
        raise GradeError(f"grade {k} exceeds the supported maximum {MAX_GRADE}")
    out: dict = {}
    for ka, ca in a.coeffs.items():
        for kb, cb in b.coeffs.items():
            idx = ka + kb
            s = _perm_sign(idx)
            if s:
                key = tuple(sorted(idx))
                out[key] = out.get(key, 0) + s * ca * cb
    return MultiVector(a.space, k, out)


def interior(v, t: MultiVector) -> MultiVector:
    """Metric contraction of ``v`` into the first slot of ``t``."""
    if t.grade == 0:
        raise GradeError("cannot contract into a scalar")
    if isinstance(v, MultiVector):
        v = v.vector()
    w = t.space.lower(v)
    out: dict = {}
    for key, c in t.coeffs.items():
        for pos, i in enumerate(key):
            if w[i]:
                rest = key[:pos] + key[pos + 1:]
                out[rest] = out.get(rest, 0) + (-1) ** pos * w[i] * c
    return MultiVector(t.space, t.grade - 1, out)


# ----------------------------------------------------------------------------
# skew endomorphisms


class SkewEndomorphism:
    """Matrix ``M`` with ``MᵀG + GM = 0``, acting on column vectors."""

    __slots__ = ("space", "matrix", "_key")

    def __init__(self, space: Space, matrix, check: bool = True):
        m = qarray(matrix)
        if m.shape != (space.dim, space.dim):
            raise ValueError("wrong matrix shape")
        if check:
            g = space.metric
            s = qmatmul(m.T, g) + qmatmul(g, m)
            if not is_zero(s):
                raise ValueError("matrix is not skew with respect to the metric")
        m.flags.writeable = False
        self.space = space
        self.matrix = m
        self._key = None

    @classmethod
    def zero(cls, space: Space) -> "SkewEndomorphism":
        return cls(space, qzeros((space.dim, space.dim)), check=False)

    def flat(self) -> dict:
        """Sparse vector of matrix entries, used for span computations."""
        if self._key is None:
            self._key = to_sparse(self.matrix.reshape(-1))
        return self._key

    @classmethod
    def from_flat(cls, space: Space, d: dict) -> "SkewEndomorphism":
        n = space.dim
        return cls(space, from_sparse(d, n * n).reshape(n, n), check=False)

    def __call__(self, v) -> np.ndarray:
        return qmatmul(self.matrix, np.asarray(v, dtype=object))

    def bracket(self, other: "SkewEndomorphism") -> "SkewEndomorphism":
        self.space.check(other.space)
        a, b = self.matrix, other.matrix
        return SkewEndomorphism(self.space, qmatmul(a, b) - qmatmul(b, a), check=False)

    def __add__(self, other: "SkewEndomorphism") -> "SkewEndomorphism":
        self.space.check(other.space)
        return SkewEndomorphism(self.space, self.matrix + other.matrix, check=False)

    def __sub__(self, other: "SkewEndomorphism") -> "SkewEndomorphism":
        self.space.check(other.space)
        return SkewEndomorphism(self.space, self.matrix - other.matrix, check=False)

    def __neg__(self) -> "SkewEndomorphism":
        return SkewEndomorphism(self.space, -self.matrix, check=False)

    def __mul__(self, c) -> "SkewEndomorphism":
        c = q(c)
        return SkewEndomorphism(self.space, self.matrix * c, check=False)

    __rmul__ = __mul__

    def __matmul__(self, other):
        """Composition as plain matrices (the result is generally not skew)."""
        return qmatmul(self.matrix, other.matrix if isinstance(other, SkewEndomorphism) else other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SkewEndomorphism):
            return NotImplemented
        return self.space == other.space and np.array_equal(self.matrix, other.matrix)

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.flat().items())))

    def is_zero(self) -> bool:
        return not self.flat()

    def bivector(self) -> MultiVector:
        return endo_bivector(self)

    def __repr__(self) -> str:
        return f"SkewEndomorphism({format_multivector(endo_bivector(self))})"


def bivector_endo(b: MultiVector) -> SkewEndomorphism:
    """Skew endomorphism ``Z ↦ Σ g(X,Z)Y − g(Y,Z)X`` of a bivector."""
    if not isinstance(b, MultiVector) or b.grade != 2:
        raise GradeError("bivector_endo needs a grade-2 multivector")
    m = qmatmul(b.dense().T, b.space.metric)
    return SkewEndomorphism(b.space, m, check=False)


def endo_bivector(e: SkewEndomorphism) -> MultiVector:
    """Inverse of :func:`bivector_endo`."""
    if isinstance(e, MultiVector):
        raise GradeError("endo_bivector needs a SkewEndomorphism")
    b = qmatmul(e.space.inverse_metric, e.matrix.T)
    return MultiVector.from_dense(e.space, b)


def as_endo(x) -> SkewEndomorphism:
    """Accept a SkewEndomorphism or a bivector."""
    if isinstance(x, SkewEndomorphism):
        return x
    if isinstance(x, MultiVector):
        return bivector_endo(x)
    raise TypeError("expected a bivector or a skew endomorphism")


def so_action(xi, t, covariant: bool = False):
    """Derivation action of the skew endomorphism ``xi`` on a tensor.

    * 1-d array: ``xi(v)``;
    * :class:`MultiVector`: ``Σ v1 ∧ .. ∧ xi v_i ∧ .. ∧ vk`` (the metric
      identification makes this the same as the action on k-forms);
    * :class:`SkewEndomorphism`: the commutator;
    * numpy array of rank 2..4 (covariant, e.g. the metric):
      ``(xi·α)(X1..Xk) = −Σ α(.., xi X_i, ..)``;
    * any object with an ``act_by(xi)`` method (curvature and torsion
      tensors) delegates to it.
    """
    xi = as_endo(xi)
    if isinstance(t, MultiVector):
        xi.space.check(t.space)
        return _act_multivector(xi, t)
    if isinstance(t, SkewEndomorphism):
        return xi.bracket(t)
    if hasattr(t, "act_by"):
        return t.act_by(xi)
    arr = np.asarray(t, dtype=object)
    if arr.ndim == 1 and not covariant:
        return xi(arr)
    if 1 <= arr.ndim <= MAX_GRADE:
        return _act_covariant(xi, arr)
    raise RankError(f"unsupported tensor rank {arr.ndim}")


def _act_multivector(xi: SkewEndomorphism, t: MultiVector) -> MultiVector:
    m = xi.matrix
    n = xi.space.dim
    cols = [[(r, m[r, c]) for r in range(n) if m[r, c]] for c in range(n)]
    out: dict = {}
    for key, c in t.coeffs.items():
        for pos, i in enumerate(key):
            for r, x in cols[i]:
                idx = key[:pos] + (r,) + key[pos + 1:]
                s = _perm_sign(idx)
                if s:
                    k2 = tuple(sorted(idx))
                    out[k2] = out.get(k2, 0) + s * x * c
    return MultiVector(t.space, t.grade, out)


def _act_covariant(xi: SkewEndomorphism, arr: np.ndarray) -> np.ndarray:
    letters = "abcd"[: arr.ndim]
    out = qzeros(arr.shape)
    for ax in range(arr.ndim):
        spec = letters.replace(letters[ax], "z")
        out = out - qeinsum(f"{spec},z{letters[ax]}->{letters}", arr, xi.matrix)
    return out


# ----------------------------------------------------------------------------
# subspaces


class Subspace:
    """Linear subspace with a canonical reduced echelon basis."""

    def __init__(self, space: Space, vectors: Iterable = ()):
        self.space = space
        ech = Echelon(to_sparse(v) for v in vectors)
        self._ech = ech
        self.basis = [from_sparse(r, space.dim) for r in ech.rows()]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.space == other.space and all(
            np.array_equal(a, b) for a, b in zip(self.basis, other.basis)) and self.dim == other.dim

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, basis={[format_vector(self.space, v) for v in self.basis]})"

    def contains(self, v) -> bool:
        return self._ech.contains(to_sparse(v))

    __contains__ = contains

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(v) for v in other.basis)

    def intersection(self, other: "Subspace") -> "Subspace":
        from .exact import span_intersection

        rows = span_intersection([to_sparse(v) for v in self.basis], [to_sparse(v) for v in other.basis])
        return Subspace(self.space, [from_sparse(r, self.space.dim) for r in rows])

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace(self.space, self.basis + other.basis)

    def orthogonal_complement(self) -> "Subspace":
        rows = [to_sparse(self.space.lower(v)) for v in self.basis]
        return Subspace(self.space, [from_sparse(r, self.space.dim) for r in nullspace(rows, self.space.dim)])

    def gram(self) -> np.ndarray:
        k = self.dim
        g = qzeros((k, k))
        for i in range(k):
            for j in range(k):
                g[i, j] = self.space.inner(self.basis[i], self.basis[j])
        return g

    def is_nondegenerate(self) -> bool:
        return inertia(self.gram())[2] == 0 if self.dim else True

    def is_totally_isotropic(self) -> bool:
        return is_zero(self.gram())

    def signature(self) -> tuple[int, int, int]:
        """(negative, positive, null) counts of the induced form."""
        pos, neg, zero = inertia(self.gram()) if self.dim else (0, 0, 0)
        return neg, pos, zero

    def is_invariant(self, endos) -> bool:
        return all(self.contains(e(v)) for e in endos for v in self.basis)


def whole(space: Space) -> Subspace:
    return Subspace(space, [space.basis_vector(i) for i in range(space.dim)])


# ----------------------------------------------------------------------------
# formatting


def format_vector(space: Space, v) -> str:
    mv = MultiVector.from_vector(space, v)
    return format_multivector(mv)


def format_multivector(t: MultiVector) -> str:
    from .rational import fmt

    if not t.coeffs:
        return "0"
    parts = []
    for key in sorted(t.coeffs):
        c = t.coeffs[key]
        blade = "^".join(t.space.labels[i] for i in key) if key else "1"
        if c == 1:
            parts.append(blade)
        elif c == -1:
            parts.append("-" + blade)
        else:
            parts.append(f"{fmt(c)}*{blade}")
    return " + ".join(parts).replace("+ -", "- ")
