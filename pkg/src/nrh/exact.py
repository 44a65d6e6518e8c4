"""Exact rational linear algebra on sparse vectors and object arrays.

Vectors are handled either as numpy object arrays of Fractions or, inside the
elimination routines, as ``{index: Fraction}`` dicts.  Everything is exact;
there is no pivot tolerance anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import lcm, prod
import random

import numpy as np

from .rational import q

# ----------------------------------------------------------------------------
# object-array helpers


def qarray(data) -> np.ndarray:
    """Object array of Fractions from nested lists/arrays of exact scalars."""
    arr = np.array(data, dtype=object)
    flat = arr.reshape(-1)
    for i, x in enumerate(flat):
        flat[i] = q(x)
    return flat.reshape(arr.shape)


def qzeros(shape) -> np.ndarray:
    arr = np.empty(shape, dtype=object)
    arr.fill(Fraction(0))
    return arr


def qeye(n: int) -> np.ndarray:
    arr = qzeros((n, n))
    for i in range(n):
        arr[i, i] = Fraction(1)
    return arr


def is_zero(arr) -> bool:
    return all(x == 0 for x in np.asarray(arr, dtype=object).reshape(-1))


def first_nonzero(arr):
    """Index tuple of the first nonzero entry, or None."""
    arr = np.asarray(arr, dtype=object)
    for idx in np.ndindex(arr.shape):
        if arr[idx] != 0:
            return idx
    return None


def to_sparse(vec) -> dict:
    return {i: Fraction(x) for i, x in enumerate(np.asarray(vec, dtype=object).reshape(-1)) if x != 0}


def from_sparse(d: dict, n: int) -> np.ndarray:
    out = qzeros(n)
    for i, x in d.items():
        out[i] = x
    return out


def _denominator_lcm(flat) -> int:
    return reduce(lcm, (x.denominator for x in flat if isinstance(x, Fraction)), 1)


def qeinsum(subscripts: str, *operands) -> np.ndarray:
    """Exact einsum for object arrays of Fractions.

    Operands are scaled to integers; if the worst-case magnitude of the result
    fits comfortably in int64 the contraction runs in native integer
    arithmetic, otherwise in Python integers.  Either way the result is exact.
    """
    scaled, denom, bounds = [], 1, []
    for op in operands:
        arr = np.asarray(op, dtype=object)
        flat = arr.reshape(-1)
        d = _denominator_lcm(flat)
        ints = np.array([int(x * d) for x in flat], dtype=object).reshape(arr.shape)
        scaled.append(ints)
        denom *= d
        bounds.append(max((abs(x) for x in ints.reshape(-1)), default=0))
    inputs, output = subscripts.replace(" ", "").split("->")
    sizes = {}
    for spec, arr in zip(inputs.split(","), scaled):
        sizes.update(zip(spec, arr.shape))
    summed = prod(sizes[c] for c in set(inputs.replace(",", "")) - set(output))
    if prod(bounds) * max(summed, 1) < 2**62:
        res = np.einsum(subscripts, *[a.astype(np.int64) for a in scaled]).astype(object)
    else:
        res = np.einsum(subscripts, *scaled)
    res = np.asarray(res, dtype=object)
    out = np.empty(res.shape, dtype=object)
    for idx in np.ndindex(res.shape):
        out[idx] = Fraction(int(res[idx]), denom)
    return out


def qmatmul(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=object)
    b = np.asarray(b, dtype=object)
    if a.ndim == 2 and b.ndim == 2:
        return qeinsum("ij,jk->ik", a, b)
    if a.ndim == 2 and b.ndim == 1:
        return qeinsum("ij,j->i", a, b)
    return a.dot(b)


# ----------------------------------------------------------------------------
# sparse elimination


def _axpy(target: dict, coef: Fraction, row: dict) -> None:
    """target -= coef * row, in place, dropping zeros."""
    for j, v in row.items():
        w = target.get(j, 0) - coef * v
        if w:
            target[j] = w
        else:
            target.pop(j, None)


class Echelon:
    """Reduced row echelon basis of a growing span of sparse vectors.

    Each stored row has a leading 1 in its pivot column and zeros in every
    other pivot column, so for a vector ``v`` in the span its coordinates
    along the stored rows are simply ``v[pivot]``.
    """

    def __init__(self, vectors=()):
        self._rows: dict[int, dict] = {}
        for v in vectors:
            self.add(v)

    def copy(self) -> "Echelon":
        e = Echelon()
        e._rows = {c: dict(r) for c, r in self._rows.items()}
        return e

    @property
    def rank(self) -> int:
        return len(self._rows)

    @property
    def pivots(self) -> list[int]:
        return sorted(self._rows)

    def rows(self) -> list[dict]:
        return [self._rows[c] for c in sorted(self._rows)]

    def reduce(self, v: dict) -> dict:
        r = dict(v)
        for c in [c for c in r if c in self._rows]:
            coef = r.get(c)
            if coef:
                _axpy(r, coef, self._rows[c])
        return r

    def add(self, v: dict) -> bool:
        """Insert ``v``; return True if it enlarged the span."""
        r = self.reduce(v)
        if not r:
            return False
        c = min(r)
        inv = 1 / r[c]
        r = {j: x * inv for j, x in r.items()}
        for row in self._rows.values():
            coef = row.get(c)
            if coef:
                _axpy(row, coef, r)
        self._rows[c] = r
        return True

    def contains(self, v: dict) -> bool:
        return not self.reduce(v)

    __contains__ = contains

    def coordinates(self, v: dict) -> list[Fraction]:
        """Coordinates of ``v`` along :meth:`rows`; raises if not in span."""
        if self.reduce(v):
            raise ValueError("vector not in span")
        return [Fraction(v.get(c, 0)) for c in sorted(self._rows)]


def rref(rows: list[dict]) -> Echelon:
    return Echelon(rows)


def nullspace(rows: list[dict], ncols: int) -> list[dict]:
    """Basis of {x : row . x = 0 for every row}."""
    ech = Echelon(rows)
    piv = ech._rows
    basis = []
    for f in range(ncols):
        if f in piv:
            continue
        x = {f: Fraction(1)}
        for c, row in piv.items():
            v = row.get(f)
            if v:
                x[c] = -v
        basis.append(x)
    return basis


def solve(rows: list[dict], rhs: list, ncols: int):
    """Particular solution of ``A x = b`` (free variables zero) or None."""
    aug = []
    for row, b in zip(rows, rhs):
        r = dict(row)
        if b:
            r[ncols] = Fraction(b)
        aug.append(r)
    ech = Echelon(aug)
    if ncols in ech._rows:
        return None
    return {c: row[ncols] for c, row in ech._rows.items() if ncols in row}


def dense_rank(matrix) -> int:
    m = np.asarray(matrix, dtype=object)
    return Echelon(to_sparse(r) for r in m).rank


def span_intersection(a: list[dict], b: list[dict]) -> list[dict]:
    """Basis of span(a) ∩ span(b) (vectors given sparsely)."""
    a = Echelon(a).rows()
    b = Echelon(b).rows()
    if not a or not b:
        return []
    # solve sum x_i a_i - sum y_j b_j = 0
    keys = set()
    for v in a + b:
        keys.update(v)
    eqs = []
    for k in sorted(keys):
        row = {}
        for i, v in enumerate(a):
            if k in v:
                row[i] = v[k]
        for j, v in enumerate(b):
            if k in v:
                row[len(a) + j] = -v[k]
        eqs.append(row)
    out = Echelon()
    for sol in nullspace(eqs, len(a) + len(b)):
        vec: dict = {}
        for i, coef in sol.items():
            if i < len(a):
                _axpy(vec, -coef, a[i])
        out.add(vec)
    return out.rows()


# ----------------------------------------------------------------------------
# symmetric forms


def inertia(matrix) -> tuple[int, int, int]:
    """(positive, negative, zero) counts of a symmetric rational matrix.

    Symmetric Gaussian elimination by congruence; when every remaining
    diagonal entry vanishes an off-diagonal pair is folded onto the diagonal.
    """
    a = [[Fraction(x) for x in row] for row in np.asarray(matrix, dtype=object)]
    n = len(a)
    for i in range(n):
        for j in range(n):
            if a[i][j] != a[j][i]:
                raise ValueError("matrix is not symmetric")
    pos = neg = 0
    active = list(range(n))
    while active:
        piv = next((i for i in active if a[i][i] != 0), None)
        if piv is None:
            pair = next(((i, j) for i in active for j in active if i != j and a[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            # row/col i += row/col j makes a[i][i] = 2 a[i][j] != 0
            for k in range(n):
                a[i][k] += a[j][k]
            for k in range(n):
                a[k][i] += a[k][j]
            piv = i
        d = a[piv][piv]
        if d > 0:
            pos += 1
        else:
            neg += 1
        active.remove(piv)
        for i in active:
            f = a[i][piv] / d
            if f:
                for k in active:
                    a[i][k] -= f * a[piv][k]
        for i in active:
            a[i][piv] = a[piv][i] = Fraction(0)
    return pos, neg, n - pos - neg


def random_rational(rng: random.Random, lo: int = -3, hi: int = 3, den: int = 2) -> Fraction:
    return Fraction(rng.randint(lo * den, hi * den), rng.randint(1, den))
