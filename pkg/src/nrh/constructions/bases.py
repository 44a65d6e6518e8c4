"""Small catalog of Riemannian models used as building blocks.

Each function returns an :class:`InfinitesimalModel` on a Euclidean space
with labels ``x1, x2, ...`` (or a custom prefix).  Validity of every entry
is asserted by the test suite rather than assumed.
"""

from __future__ import annotations

from ..mlinalg import MultiVector, Space, as_endo
from ..models import InfinitesimalModel
from ..rational import q
from ..torsioncurv import CurvatureTensor, TorsionTensor
from .assembly import direct_sum


def _space(n: int, prefix: str) -> Space:
    return Space.euclidean(n, [f"{prefix}{i + 1}" for i in range(n)])


def flat_base(n: int, prefix: str = "x") -> InfinitesimalModel:
    return InfinitesimalModel(_space(n, prefix), name=f"flat{n}")


def sphere_base(n: int, a=1, prefix: str = "x") -> InfinitesimalModel:
    """Constant curvature ``C0(X, Y) = a X∧Y``, no torsion."""
    sp = _space(n, prefix)
    return InfinitesimalModel(sp, CurvatureTensor.constant(sp, a), name=f"sphere{n}({q(a)})")


def so3_base(a=1, c=0, prefix: str = "x") -> InfinitesimalModel:
    """Three dimensions, ``C0 = a X∧Y`` and torsion ``c`` times the volume form."""
    sp = _space(3, prefix)
    T = TorsionTensor(sp.blade(0, 1, 2) * c)
    return InfinitesimalModel(sp, CurvatureTensor.constant(sp, a), T, name=f"so3({q(a)},{q(c)})")


def kahler_form(space: Space, offset: int = 0, pairs: int | None = None):
    """``x1∧x2 + x3∧x4 + ...`` starting at basis index ``offset``."""
    pairs = (space.dim - offset) // 2 if pairs is None else pairs
    J = space.blade(offset, offset + 1)
    for k in range(1, pairs):
        J = J + space.blade(offset + 2 * k, offset + 2 * k + 1)
    return J


def u2_base(a=1, prefix: str = "x") -> InfinitesimalModel:
    """Four dimensions, ``C0(X,Y) = a(X∧Y + JX∧JY + 2g(JX,Y)J)``.

    This is the curvature of constant holomorphic sectional curvature; its
    image is u(2).
    """
    sp = _space(4, prefix)
    a = q(a)
    J = kahler_form(sp)
    Je = as_endo(J)

    def value(i, j):
        x, y = sp.basis_vector(i), sp.basis_vector(j)
        jx, jy = Je(x), Je(y)
        b = (MultiVector.from_vector(sp, x) ^ MultiVector.from_vector(sp, y))
        b = b + (MultiVector.from_vector(sp, jx) ^ MultiVector.from_vector(sp, jy))
        b = b + J * (2 * sp.inner(jx, y))
        return b * a

    return InfinitesimalModel(sp, CurvatureTensor.from_function(sp, value), name=f"u2({a})")


def product_base(*bases, prefix: str = "x") -> InfinitesimalModel:
    """Orthogonal product, relabelled ``x1..xn`` in factor order."""
    n = sum(b.dim for b in bases)
    return direct_sum(bases, labels=[f"{prefix}{i + 1}" for i in range(n)],
                      name=" x ".join(b.name for b in bases))


def base_by_name(name: str, a=1, b=1, c=0) -> InfinitesimalModel:
    """Resolve the base names accepted by the parametrised families."""
    table = {
        "flat2": lambda: flat_base(2),
        "flat3": lambda: flat_base(3),
        "flat4": lambda: flat_base(4),
        "sphere2": lambda: sphere_base(2, a),
        "sphere3": lambda: sphere_base(3, a),
        "so3": lambda: so3_base(a, c),
        "u2": lambda: u2_base(a),
        "sphere2xsphere2": lambda: product_base(sphere_base(2, a), sphere_base(2, b)),
    }
    try:
        return table[name]()
    except KeyError:
        raise ValueError(f"unknown base {name!r}; choose from {sorted(table)}") from None


BASE_NAMES = ("flat2", "flat3", "flat4", "sphere2", "sphere3", "so3", "u2", "sphere2xsphere2")
