"""Plumbing shared by the builders: clause reports and block embeddings."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..exact import qzeros
from ..mlinalg import MultiVector, SkewEndomorphism, Space, _perm_sign, as_endo, bivector_endo, endo_bivector
from ..models import InfinitesimalModel
from ..torsioncurv import CurvatureTensor, TorsionTensor


@dataclass
class Clause:
    """One named constraint of a family and whether it holds.

    ``required`` clauses are hypotheses of the construction and block a
    build when they fail.  Non-required ones are genericity conditions
    (nonzero curvature, no flat or decoupled factor); they are reported and
    used to filter parameter grids.
    """

    clause: str
    passed: bool
    detail: str = ""
    required: bool = True

    def as_dict(self) -> dict:
        return {"clause": self.clause, "passed": bool(self.passed), "detail": self.detail,
                "required": self.required}


@dataclass
class ConstraintReport:
    family: str
    clauses: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        """True when every required clause holds."""
        return all(c.passed for c in self.clauses if c.required)

    @property
    def generic(self) -> bool:
        """True when every clause, required or not, holds."""
        return all(c.passed for c in self.clauses)

    @property
    def failed(self) -> list:
        return [c for c in self.clauses if c.required and not c.passed]

    def as_dict(self) -> dict:
        return {"family": self.family, "passed": self.passed, "generic": self.generic,
                "clauses": [c.as_dict() for c in self.clauses]}

    def text(self) -> str:
        lines = [f"{self.family}: {'PASS' if self.passed else 'FAIL'}"]
        for c in self.clauses:
            mark = "ok  " if c.passed else ("FAIL" if c.required else "warn")
            lines.append(f"  [{mark}] {c.clause}" + (f"  ({c.detail})" if c.detail else ""))
        return "\n".join(lines)


# ----------------------------------------------------------------------------
# embeddings by label


def _index_map(source: Space, target: Space) -> list[int]:
    return [target.index(lab) for lab in source.labels]


def lift_multivector(t: MultiVector, target: Space) -> MultiVector:
    """Copy a multivector into a larger space containing the same labels."""
    im = _index_map(t.space, target)
    out: dict = {}
    for key, c in t.coeffs.items():
        idx = tuple(im[i] for i in key)
        out[tuple(sorted(idx))] = _perm_sign(idx) * c
    return MultiVector(target, t.grade, out)


def lift_vector(v, source: Space, target: Space) -> np.ndarray:
    out = qzeros(target.dim)
    for i, j in enumerate(_index_map(source, target)):
        out[j] = v[i]
    return out


def lift_endo(e, target: Space) -> SkewEndomorphism:
    """Extend a skew endomorphism by zero on the orthogonal complement.

    Valid because the source space sits in ``target`` as an orthogonal
    block with the same metric.
    """
    return bivector_endo(lift_multivector(endo_bivector(as_endo(e)), target))


def lift_curvature(R: CurvatureTensor, target: Space) -> CurvatureTensor:
    im = _index_map(R.space, target)
    n = target.dim
    arr = qzeros((n, n, n, n))
    arr[np.ix_(im, im, im, im)] = R.array
    return CurvatureTensor(target, arr, check=False)


def lift_torsion(T: TorsionTensor, target: Space) -> TorsionTensor:
    return TorsionTensor(lift_multivector(T.three_form, target))


def block_space(blocks, frame: str = "general") -> Space:
    """Orthogonal sum of spaces; labels must be distinct across blocks."""
    labels = [lab for s in blocks for lab in s.labels]
    n = len(labels)
    g = qzeros((n, n))
    off = 0
    for s in blocks:
        g[off:off + s.dim, off:off + s.dim] = s.metric
        off += s.dim
    return Space(g, labels, frame)


def relabel(space: Space, labels) -> Space:
    return Space(space.metric, labels, space.frame)


def relabel_model(m: InfinitesimalModel, labels) -> InfinitesimalModel:
    sp = relabel(m.space, labels)
    T = TorsionTensor(MultiVector(sp, 3, m.T.three_form.coeffs))
    R = CurvatureTensor(sp, m.R.array, check=False)
    return InfinitesimalModel(sp, R, T, m.name, m.candidate_splittings, m.meta)


def direct_sum(models, labels=None, name: str = "") -> InfinitesimalModel:
    """Orthogonal product of models: ``R = R1 + R2``, ``T = T1 + T2``.

    Labels clash easily, so pass ``labels`` for the combined space when the
    factors share names.
    """
    models = list(models)
    if labels is not None:
        out, off = [], 0
        for m in models:
            out.append(relabel_model(m, labels[off:off + m.dim]))
            off += m.dim
        models = out
    space = block_space([m.space for m in models])
    R = CurvatureTensor.zero(space)
    T = TorsionTensor.zero(space)
    splitting, off = [], 0
    for m in models:
        R = R + lift_curvature(m.R, space)
        T = T + lift_torsion(m.T, space)
        splitting.append(list(range(off, off + m.dim)))
        off += m.dim
    return InfinitesimalModel(space, R, T, name or " x ".join(m.name or "?" for m in models),
                              candidate_splittings=[splitting])

