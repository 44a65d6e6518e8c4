"""JSON model files.

Layout (all scalars are rational strings such as ``"-3/2"``)::

    {
      "version": 1,
      "dim": 3,
      "metric": [["0","0","1"], ["0","1","0"], ["1","0","0"]],
      "frame": "witt" | "orthonormal" | "general",
      "basis_labels": ["p", "e", "q"],
      "torsion": [{"indices": [0, 1, 2], "value": "1"}],
      "curvature": [{"indices": [2, 1], "matrix": [[...], ...]}],
      "candidate_splitting": [[0, 2], [1]],
      "meta": {...}
    }

Indices are 0-based.  A torsion entry is the coefficient of
``e_i∧e_j∧e_k`` in the torsion 3-vector; a curvature entry gives the
endomorphism ``R(e_i, e_j)`` as a matrix acting on column vectors
(``R(e_j, e_i)`` follows by skewness).  Instead of a list, ``curvature``
may be ``{"solve_for": "curvature", "holonomy": [matrix, ...]}``, asking
for the space of curvature tensors with values in the span of the given
endomorphisms.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import SchemaError
from .liealg import SubalgebraSO
from .mlinalg import MultiVector, SkewEndomorphism, Space
from .models import InfinitesimalModel
from .rational import fmt, parse_rational
from .torsioncurv import CurvatureTensor, TorsionTensor

VERSION = 1


class SolveRequest:
    """A model file that asks for its curvature instead of listing it."""

    def __init__(self, space: Space, torsion: TorsionTensor, algebra: SubalgebraSO, name: str = ""):
        self.space, self.T, self.algebra, self.name = space, torsion, algebra, name


def _rational(x, where: str):
    if isinstance(x, bool) or not isinstance(x, (str, int)):
        raise SchemaError(f"{where}: expected a rational string, got {x!r}")
    try:
        return parse_rational(str(x))
    except ValueError as exc:
        raise SchemaError(f"{where}: {exc}") from None


def _matrix(rows, n: int, where: str):
    if not isinstance(rows, list) or len(rows) != n or any(not isinstance(r, list) or len(r) != n for r in rows):
        raise SchemaError(f"{where}: expected a {n}×{n} matrix")
    return [[_rational(x, f"{where}[{i}][{j}]") for j, x in enumerate(r)] for i, r in enumerate(rows)]


def _index(i, n: int, where: str) -> int:
    if isinstance(i, bool) or not isinstance(i, int) or not 0 <= i < n:
        raise SchemaError(f"{where}: index {i!r} out of range 0..{n - 1}")
    return i


def _require(d: dict, key: str):
    if key not in d:
        raise SchemaError(f"missing field {key!r}")
    return d[key]


def model_from_dict(d: dict):
    """Parse a model file document; returns a model or a :class:`SolveRequest`."""
    if not isinstance(d, dict):
        raise SchemaError("top level must be a JSON object")
    version = d.get("version", VERSION)
    if version != VERSION:
        raise SchemaError(f"unsupported version {version!r}")
    n = _require(d, "dim")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise SchemaError("dim: expected a positive integer")
    g = _matrix(_require(d, "metric"), n, "metric")
    labels = d.get("basis_labels")
    if labels is not None and (not isinstance(labels, list) or len(labels) != n):
        raise SchemaError(f"basis_labels: expected {n} labels")
    frame = d.get("frame", "general")
    try:
        space = Space(g, labels, frame)
    except ValueError as exc:
        raise SchemaError(f"metric: {exc}") from None

    three = MultiVector.zero(space, 3)
    for k, entry in enumerate(d.get("torsion", [])):
        where = f"torsion[{k}]"
        if not isinstance(entry, dict):
            raise SchemaError(f"{where}: expected an object")
        idx = _require(entry, "indices")
        if not isinstance(idx, list) or len(idx) != 3:
            raise SchemaError(f"{where}.indices: expected three indices")
        idx = [_index(i, n, f"{where}.indices") for i in idx]
        if len(set(idx)) != 3:
            raise SchemaError(f"{where}.indices: repeated index")
        three = three + space.blade(*idx) * _rational(_require(entry, "value"), f"{where}.value")
    T = TorsionTensor(three)

    curv = d.get("curvature", [])
    if isinstance(curv, dict):
        if curv.get("solve_for") != "curvature":
            raise SchemaError("curvature: expected a list or {\"solve_for\": \"curvature\", ...}")
        gens = []
        for k, mat in enumerate(curv.get("holonomy", [])):
            try:
                gens.append(SkewEndomorphism(space, _matrix(mat, n, f"curvature.holonomy[{k}]")))
            except ValueError as exc:
                raise SchemaError(f"curvature.holonomy[{k}]: {exc}") from None
        return SolveRequest(space, T, SubalgebraSO(space, gens), d.get("name", ""))
    if not isinstance(curv, list):
        raise SchemaError("curvature: expected a list")
    values = {}
    for k, entry in enumerate(curv):
        where = f"curvature[{k}]"
        if not isinstance(entry, dict):
            raise SchemaError(f"{where}: expected an object")
        idx = _require(entry, "indices")
        if not isinstance(idx, list) or len(idx) != 2:
            raise SchemaError(f"{where}.indices: expected two indices")
        i, j = (_index(x, n, f"{where}.indices") for x in idx)
        try:
            endo = SkewEndomorphism(space, _matrix(_require(entry, "matrix"), n, f"{where}.matrix"))
        except ValueError as exc:
            raise SchemaError(f"{where}.matrix: {exc}") from None
        values[(i, j)] = endo
    try:
        R = CurvatureTensor.from_values(space, values)
    except ValueError as exc:
        raise SchemaError(f"curvature: {exc}") from None

    splits = d.get("candidate_splitting") or []
    for k, part in enumerate(splits):
        if not isinstance(part, list):
            raise SchemaError(f"candidate_splitting[{k}]: expected a list of index lists")
        for blk in part:
            if not isinstance(blk, list):
                raise SchemaError(f"candidate_splitting[{k}]: expected index lists")
            for i in blk:
                _index(i, n, f"candidate_splitting[{k}]")
    return InfinitesimalModel(space, R, T, d.get("name", ""), candidate_splittings=splits, meta=d.get("meta"))


def model_to_dict(m: InfinitesimalModel) -> dict:
    sp = m.space
    n = sp.dim
    torsion = [{"indices": list(key), "value": fmt(c)} for key, c in sorted(m.T.three_form.coeffs.items()) if c]
    curvature = []
    for i in range(n):
        for j in range(i + 1, n):
            mat = m.R.value(i, j).matrix
            if any(mat.reshape(-1)):
                curvature.append({"indices": [i, j], "matrix": [[fmt(x) for x in row] for row in mat]})
    d = {"version": VERSION, "name": m.name, "dim": n,
         "metric": [[fmt(x) for x in row] for row in sp.metric], "frame": sp.frame,
         "basis_labels": list(sp.labels), "torsion": torsion, "curvature": curvature}
    if m.candidate_splittings:
        d["candidate_splitting"] = m.candidate_splittings
    meta = {k: v for k, v in m.meta.items() if _jsonable(v)}
    if meta:
        d["meta"] = meta
    return d


def _jsonable(v) -> bool:
    try:
        json.dumps(v)
        return True
    except (TypeError, ValueError):
        return False


def load_model(path):
    """Read a model file; raises OSError or :class:`SchemaError`."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return model_from_dict(doc)


def dump_model(m: InfinitesimalModel, path=None) -> str:
    text = json.dumps(model_to_dict(m), indent=2, ensure_ascii=False) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text
