"""Command-line entry point ``nrh``.

Exit codes:

* 0: every check passed
* 1: I/O error, malformed model file, bad arguments or unknown family
* 2: the input is well formed but a validation or constraint check failed

With ``--json`` every command prints one JSON object carrying
``"schema": "nrh-report/1"``; otherwise a text rendering of the same data.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from . import coordgeo
from .constructions import (FAMILIES, build_family, case_matches_label, catalog, default_grid,
                            family_constraint_check, get_family)
from .errors import FamilyConstraintError, NRHError, RankUnstable, SchemaError, SignatureError
from .liealg import classify, structure_report
from .modelfile import SolveRequest, dump_model, load_model
from .models import classify_case, natural_reductivity_violation, transvection, validate
from .rational import fmt, parse_rational
from .torsioncurv import berger_check, curvature_space

REPORT_SCHEMA = "nrh-report/1"
EXIT_OK, EXIT_ERROR, EXIT_FAIL = 0, 1, 2


class UsageError(Exception):
    """Bad command-line input; reported with exit code 1."""


def _emit(args, report: dict, text: str) -> None:
    if args.json:
        print(json.dumps({"schema": REPORT_SCHEMA, "command": args.command, **report}, indent=2, default=str))
    else:
        print(text)


# ----------------------------------------------------------------------------
# model commands


def _load(path):
    try:
        return load_model(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None


def _solve_report(req: SolveRequest) -> tuple[dict, str, bool]:
    cs = curvature_space(req.algebra, req.T)
    berger = berger_check(req.algebra, req.T)
    rep = {"solve_for": "curvature", "algebra_dim": req.algebra.dim, "solutions_exist": not cs.is_empty,
           "linear_dim": cs.linear_dim, "image_dim": cs.image_span().dim, "berger": berger, "passed": not cs.is_empty}
    text = "\n".join([f"requested algebra dim {req.algebra.dim}",
                      "no curvature tensor satisfies the Bianchi identity" if cs.is_empty
                      else f"curvature tensors: affine space of dim {cs.linear_dim}",
                      f"span of their images: dim {rep['image_dim']} (Berger algebra: {berger})",
                      "overall: " + ("PASS" if rep["passed"] else "FAIL")])
    return rep, text, rep["passed"]


def cmd_validate(args) -> int:
    m = _load(args.path)
    if isinstance(m, SolveRequest):
        rep, text, ok = _solve_report(m)
        _emit(args, rep, text)
        return EXIT_OK if ok else EXIT_FAIL
    report = validate(m)
    _emit(args, {"model": m.name, "dim": m.dim, **report.as_dict()}, report.text())
    return EXIT_OK if report.passed else EXIT_FAIL


def _derived_info(L) -> dict:
    d1 = L.subalgebra(L.derived()) if L.dim else L
    d2 = d1.subalgebra(d1.derived()) if d1.dim else d1
    cls = classify(d1)
    return {"dim": d1.dim, "classification": cls.as_dict(), "second_derived_dim": d2.dim,
            "basis": [L.format_vector(v) for v in L.derived()]}


def cmd_classify(args) -> int:
    m = _load(args.path)
    if isinstance(m, SolveRequest):
        raise UsageError("classify needs a model with explicit curvature, not a solve_for request")
    report = validate(m)
    if not report.passed:
        _emit(args, {"passed": False, "validation": report.as_dict()},
              report.text() + "\nnot an infinitesimal model; nothing to classify")
        return EXIT_FAIL
    try:
        case = classify_case(m, seed=args.seed)
    except SignatureError as exc:
        _emit(args, {"passed": False, "error": str(exc)}, f"cannot classify: {exc}")
        return EXIT_FAIL
    L = transvection(m)
    derived = _derived_info(L)
    label = m.meta.get("label")
    rep = {"passed": True, "model": m.name, "case": case.as_dict(), "transvection_dim": L.dim,
           "derived_algebra": derived}
    kind = "flat/symmetric" if case.case is None else f"case {case.case}"
    lines = [f"{kind} ({case.kind})"]
    if case.dim_L is not None:
        lines.append(f"dim L = {case.dim_L}")
    lines.append(f"transvection algebra dim {L.dim}; derived algebra dim {derived['dim']}"
                 f" ≅ {derived['classification']['name']} ({derived['classification']['label']})")
    lines.append(f"second derived algebra dim {derived['second_derived_dim']}")
    if label:
        match = case_matches_label(case.case, label)
        rep["expected_label"], rep["label_matches"] = label, match
        lines.append(f"expected label {label}: {'match' if match else 'MISMATCH'}")
        if not match:
            rep["passed"] = False
    _emit(args, rep, "\n".join(lines))
    return EXIT_OK if rep["passed"] else EXIT_FAIL


def cmd_transvection(args) -> int:
    m = _load(args.path)
    if isinstance(m, SolveRequest):
        raise UsageError("transvection needs a model with explicit curvature")
    report = validate(m)
    if not report.passed:
        _emit(args, {"passed": False, "validation": report.as_dict()},
              report.text() + "\nnot an infinitesimal model; the bracket would not satisfy Jacobi")
        return EXIT_FAIL
    L = transvection(m)
    brackets = []
    for i in range(L.dim):
        for j in range(i + 1, L.dim):
            v = L.bracket_basis(i, j)
            if v:
                brackets.append({"pair": [L.labels[i], L.labels[j]], "value": L.format_vector(v)})
    struct = structure_report(L)
    cls = classify(L, seed=args.seed)
    nr = natural_reductivity_violation(m, L)
    ok = struct.jacobi_ok and nr is None
    rep = {"passed": ok, "dim": L.dim, "labels": list(L.labels), "holonomy_dim": L.holonomy_dim,
           "brackets": brackets, "structure": struct.as_dict(), "classification": cls.as_dict(),
           "natural_reductivity_violation": list(nr) if nr else None, "derived_algebra": _derived_info(L)}
    lines = [f"transvection algebra: dim {L.dim} (holonomy part {L.holonomy_dim})"]
    lines += [f"  [{b['pair'][0]}, {b['pair'][1]}] = {b['value']}" for b in brackets]
    sig = struct.killing_signature
    lines.append(f"Killing signature (+{sig[0]}, -{sig[1]}, 0×{sig[2]}); Jacobi {'ok' if struct.jacobi_ok else 'FAILS'}")
    lines.append(f"classification: {cls.name} ({cls.label})")
    lines.append("naturally reductive: " + ("yes" if nr is None else f"NO at {nr}"))
    _emit(args, rep, "\n".join(lines))
    return EXIT_OK if ok else EXIT_FAIL


# ----------------------------------------------------------------------------
# constructions


def _parse_params(pairs) -> dict:
    out = {}
    for item in pairs or []:
        key, sep, val = item.partition("=")
        if not sep or not key:
            raise UsageError(f"--param expects key=value, got {item!r}")
        out[key.strip()] = val.strip()
    return out


def _family(name):
    try:
        return get_family(name)
    except KeyError:
        raise UsageError(f"unknown family {name!r}; known families: {', '.join(sorted(FAMILIES))}") from None


def cmd_construct(args) -> int:
    fam = _family(args.family)
    raw = _parse_params(args.param)
    if args.grid:
        return _construct_grid(args, fam, raw)
    try:
        params = fam.params(raw)
    except ValueError as exc:
        raise UsageError(f"{fam.name}: {exc}") from None
    try:
        m = build_family(fam.name, params)
    except FamilyConstraintError:
        report = family_constraint_check(params, fam.name)
        _emit(args, {"passed": False, "constraints": report.as_dict()}, report.text())
        return EXIT_FAIL
    text = dump_model(m)
    if args.out:
        _write(args.out, text)
        report = validate(m)
        _emit(args, {"passed": report.passed, "family": fam.name, "params": params.as_strings(), "out": args.out,
                     "validation": report.as_dict()},
              f"wrote {args.out} ({fam.name}, dim {m.dim}); validate: {'PASS' if report.passed else 'FAIL'}")
        return EXIT_OK if report.passed else EXIT_FAIL
    sys.stdout.write(text)
    return EXIT_OK


def _write(path, text):
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror or exc}") from None


def _construct_grid(args, fam, overrides) -> int:
    fixed = {k: v for k, v in overrides.items() if k not in fam.scalars}
    if args.out:
        try:
            Path(args.out).mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise UsageError(f"cannot create {args.out}: {exc.strerror or exc}") from None
    entries, ok = [], True
    for k, point in enumerate(default_grid(fam.name, seed=args.seed)):
        params = {**fixed, **{key: fmt(v) for key, v in point.items()}}
        m = build_family(fam.name, params)
        passed = validate(m).passed
        ok &= passed
        entry = {"params": {k2: fmt(v) for k2, v in point.items()}, "valid": passed}
        if args.out:
            path = Path(args.out) / f"{fam.name}-{k:03d}.json"
            _write(path, dump_model(m))
            entry["file"] = str(path)
        entries.append(entry)
    lines = [f"{fam.name}: {len(entries)} grid points"]
    lines += [f"  {'PASS' if e['valid'] else 'FAIL'}  " + ", ".join(f"{a}={b}" for a, b in e["params"].items())
              for e in entries]
    _emit(args, {"passed": ok, "family": fam.name, "points": entries}, "\n".join(lines))
    return EXIT_OK if ok else EXIT_FAIL


def _user_catalog(dim):
    root = os.environ.get("NRH_CATALOG_DIR")
    if not root:
        return [], []
    found, errors = [], []
    for path in sorted(Path(root).glob("*.json")):
        try:
            m = load_model(path)
        except (OSError, SchemaError) as exc:
            errors.append(f"{path}: {exc}")
            continue
        if isinstance(m, SolveRequest) or (dim is not None and m.dim != dim):
            continue
        found.append((path, m))
    return found, errors


def cmd_catalog(args) -> int:
    if args.dim is not None and args.dim not in (3, 4, 5):
        raise UsageError("the shipped catalog covers dimensions 3, 4 and 5")
    fams = catalog(args.dim) if args.dim is not None else [f for f in FAMILIES.values() if f.dim]
    entries, ok = [], True
    lines = []
    for fam in fams:
        entry = {"family": fam.name, "dim": fam.dim, "label": fam.label, "summary": fam.summary,
                 "defaults": {k: fmt(v) for k, v in fam.defaults.items()}, "scalars": list(fam.scalars)}
        lines.append(f"{fam.name:18s} dim {fam.dim}  {fam.label or '':14s} {fam.summary}")
        if args.grid:
            pts = []
            for point in default_grid(fam.name, seed=args.seed):
                m = build_family(fam.name, point)
                valid = validate(m).passed
                case = classify_case(m, seed=args.seed).case if valid else None
                match = valid and case_matches_label(case, fam.label)
                ok &= match
                pts.append({"params": {k: fmt(v) for k, v in point.items()}, "valid": valid, "case": case,
                            "label_matches": match})
            entry["grid"] = pts
            bad = sum(not p["label_matches"] for p in pts)
            lines.append(f"    {len(pts)} grid points, {len(pts) - bad} valid with matching case")
        entries.append(entry)
    user, errors = _user_catalog(args.dim)
    for path, m in user:
        valid = validate(m).passed
        ok &= valid
        entries.append({"family": None, "file": str(path), "name": m.name, "dim": m.dim, "valid": valid})
        lines.append(f"{m.name or path.stem:18s} dim {m.dim}  user file {path}  validate: {'PASS' if valid else 'FAIL'}")
    for err in errors:
        lines.append(f"skipped {err}")
    _emit(args, {"passed": ok and not errors, "entries": entries, "errors": errors}, "\n".join(lines))
    if errors:
        return EXIT_ERROR
    return EXIT_OK if ok else EXIT_FAIL


# ----------------------------------------------------------------------------
# coordinate metrics


def _float_matrix(text, n, what):
    if text is None:
        return None
    t = text.strip()
    if t in ("I", "0", "J"):
        if n is None:
            raise UsageError(f"--{what} {t} needs --n")
        if t == "I":
            return np.eye(n)
        if t == "0":
            return np.zeros((n, n))
        if n % 2:
            raise UsageError("J needs even n")
        J = np.zeros((n, n))
        for i in range(0, n, 2):
            J[i, i + 1], J[i + 1, i] = -1.0, 1.0
        return J
    try:
        rows = json.loads(t)
        mat = np.array([[float(parse_rational(str(x))) for x in r] for r in rows], dtype=float)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"--{what}: expected I, 0, J or a JSON matrix ({exc})") from None
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise UsageError(f"--{what}: matrix must be square")
    return mat


def _coords_setup(args):
    if args.kind == "file":
        if not args.path:
            raise UsageError("coords file needs a path")
        try:
            doc = json.loads(Path(args.path).read_text(encoding="utf-8"))
            metric = coordgeo.CoordinateMetric.from_dict(doc["metric"])
            torsion = coordgeo.TorsionDescriptor.from_dict(doc["torsion"]) if doc.get("torsion") else None
        except OSError as exc:
            raise UsageError(f"cannot read {args.path}: {exc.strerror or exc}") from None
        except (ValueError, KeyError, TypeError) as exc:
            raise SchemaError(f"{args.path}: {exc!r}") from None
        return metric, torsion
    n = args.n
    if args.kind == "plane-wave":
        A = _float_matrix(args.A or "I", n, "A")
        n = A.shape[0]
        F = _float_matrix(args.F or "0", n, "F")
        try:
            metric = coordgeo.CoordinateMetric.plane_wave(A, F)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        default_omega = metric.F
    else:
        if n is None:
            raise UsageError("pp-wave needs --n")
        Q = _float_matrix(args.A or "I", n, "A")
        metric = coordgeo.CoordinateMetric.pp_wave(n, coordgeo.Poly.quadratic(Q, metric_names(n)))
        default_omega = np.zeros((n, n))
    omega = default_omega if args.omega is None else _float_matrix(args.omega, metric.n, "omega")
    try:
        torsion = coordgeo.TorsionDescriptor.from_matrix(omega)
    except ValueError as exc:
        raise UsageError(f"--omega: {exc}") from None
    return metric, torsion


def metric_names(n):
    return [f"x{i + 1}" for i in range(n)]


def cmd_coords(args) -> int:
    metric, torsion = _coords_setup(args)
    try:
        tol = coordgeo.NumericTolerance(abs_tol=args.tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    checks = args.check or ["nablaT", "curvature", "holonomy"]
    pts = coordgeo.sample_points(metric.dim, args.samples, args.seed)
    rep = {"metric": metric.to_dict(), "torsion": torsion.to_dict() if torsion else None, "seed": args.seed,
           "tolerance": {"abs_tol": tol.abs_tol, "svd_cut": tol.svd_cut}, "checks": {}}
    lines, ok = [], True
    if "nablaT" in checks:
        res = [coordgeo.nablaT_residual(metric, torsion, p) for p in pts]
        passed = max(res) < tol.abs_tol
        rep["checks"]["nablaT"] = {"passed": passed, "max_residual": max(res), "points": len(res)}
        lines.append(f"{'PASS' if passed else 'FAIL'}  |∇T| max {max(res):.3e} over {len(res)} points (tol {tol.abs_tol:g})")
        ok &= passed
    if "curvature" in checks:
        norms, drift = [], []
        for p in pts:
            R, dR = coordgeo.covariant_curvature(metric, torsion, p, depth=1)
            norms.append(float(np.max(np.abs(R))))
            drift.append(float(np.max(np.abs(dR))))
        passed = max(drift) < tol.abs_tol
        rep["checks"]["curvature"] = {"passed": passed, "max_R": max(norms), "max_nablaR": max(drift),
                                      "points": len(pts)}
        lines.append(f"{'PASS' if passed else 'FAIL'}  |∇R| max {max(drift):.3e}, |R| max {max(norms):.3e}")
        ok &= passed
    if "holonomy" in checks:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RankUnstable)
            hol = coordgeo.infinitesimal_holonomy(metric, torsion, samples=pts, tol=tol)
        entry = {"passed": hol.stable, **hol.as_dict()}
        entry["seed"] = args.seed
        if metric.family == "plane_wave":
            F2 = metric.F @ metric.F
            entry["rank_A_minus_F2"] = int(np.linalg.matrix_rank(metric.A - F2))
            entry["rank_2A_minus_F2"] = int(np.linalg.matrix_rank(2 * metric.A - F2))
        rep["checks"]["holonomy"] = entry
        lines.append(f"{'PASS' if hol.stable else 'FAIL'}  holonomy rank {hol.rank}"
                     f" (ranks at cuts {list(hol.ranks_at_cut.values())}, per point {hol.sample_ranks})")
        lines += [f"      {w}" for w in hol.warnings]
        ok &= hol.stable
    rep["passed"] = ok
    lines.append("overall: " + ("PASS" if ok else "FAIL"))
    _emit(args, rep, "\n".join(lines))
    return EXIT_OK if ok else EXIT_FAIL


# ----------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=int, default=0, help="seed for randomised searches and sampling")
    common.add_argument("--tol", type=float, default=1e-8, help="absolute tolerance for numeric checks")

    p = _Parser(prog="nrh", description="Infinitesimal models with parallel skew torsion.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, fn, helptext in (("validate", cmd_validate, "check the model conditions"),
                               ("classify", cmd_classify, "locate a Lorentzian model among cases 1-7"),
                               ("transvection", cmd_transvection, "print the transvection algebra")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("path")
        s.set_defaults(func=fn)

    s = sub.add_parser("construct", parents=[common], help="build a model from a named family")
    s.add_argument("--family", required=True)
    s.add_argument("--param", action="append", metavar="KEY=VALUE", help="rational parameter override")
    s.add_argument("--out", help="output file (directory with --grid); stdout otherwise")
    s.add_argument("--grid", action="store_true", help="build the family's default parameter grid")
    s.set_defaults(func=cmd_construct)

    s = sub.add_parser("catalog", parents=[common], help="list shipped families (and NRH_CATALOG_DIR files)")
    s.add_argument("--dim", type=int)
    s.add_argument("--grid", action="store_true", help="build, validate and classify every grid point")
    s.set_defaults(func=cmd_catalog)

    s = sub.add_parser("coords", parents=[common], help="numeric checks on coordinate metrics")
    s.add_argument("kind", choices=["plane-wave", "pp-wave", "file"])
    s.add_argument("path", nargs="?", help="JSON file for kind 'file'")
    s.add_argument("--A", help="I, 0, J or a JSON matrix (plane-wave A, or pp-wave quadratic form)")
    s.add_argument("--F", help="skew matrix F of a plane wave: 0, J or JSON")
    s.add_argument("--n", type=int, help="screen dimension when --A or --F is I, 0 or J")
    s.add_argument("--omega", help="skew table of torsion coefficients (default: F)")
    s.add_argument("--check", action="append", choices=["nablaT", "curvature", "holonomy"])
    s.add_argument("--samples", type=int, default=5)
    s.set_defaults(func=cmd_coords)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, SchemaError) as exc:
        kind = "schema error" if isinstance(exc, SchemaError) else "error"
        print(f"nrh: {kind}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except NRHError as exc:
        print(f"nrh: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
