"""Command line interface.

Every invocation writes a single JSON report to stdout and human-readable
notes to stderr.  Matrix arguments accept either a file path (JSON
``{"n": int, "data": [[...]]}`` or bare ``[[...]]``, CSV rows without a
header) or an inline JSON array.  Exit codes: 0 success, 2 parse/format
error, 3 domain/precondition error, 4 non-convergence.
"""

import argparse
import hashlib
import json
import os
import sys

import numpy as np

from .decompose import geodesic_project, mostow_gl, mostow_spd
from .errors import ConvergenceError, DomainError, ParseError
from .manifold import GeodesicSegment, distance, geodesic, sectional_curvature_id
from .matfun import frobenius, spd_exp, spd_log
from .subspace import (
    block_antidiag_subspace,
    block_diag_subspace,
    diag_subspace,
    load_subspace,
    lts_check,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_DOMAIN = 3
EXIT_NO_CONVERGENCE = 4

# Inputs whose asymmetry exceeds this fraction of their norm are rejected;
# smaller asymmetries are symmetrized with a warning.
_ASYM_TOL = 1e-9


def _default_tol():
    env = os.environ.get("SPD_TOL")
    if env is None:
        return 1e-11
    try:
        return float(env)
    except ValueError as exc:
        raise ParseError(f"SPD_TOL={env!r} is not a number: {exc}") from exc


# ---------------------------------------------------------------------------
# Matrix ingestion


def _parse_rows(rows, origin):
    try:
        m = np.asarray(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{origin}: not a numeric matrix: {exc}") from exc
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ParseError(f"{origin}: expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ParseError(f"{origin}: matrix contains non-finite entries")
    return m


def _read_csv(text, origin):
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        try:
            rows.append([float(tok) for tok in line.replace(",", " ").split()])
        except ValueError as exc:
            raise ParseError(f"{origin}: bad CSV row {line!r}: {exc}") from exc
    if not rows:
        raise ParseError(f"{origin}: empty CSV payload")
    return rows


def _read_json_matrix(obj, origin):
    if isinstance(obj, dict):
        if "data" not in obj:
            raise ParseError(f'{origin}: JSON object needs a "data" field')
        rows = obj["data"]
        m = _parse_rows(rows, origin)
        if "n" in obj and int(obj["n"]) != m.shape[0]:
            raise ParseError(
                f"{origin}: declared n={obj['n']} but data is {m.shape[0]} x {m.shape[1]}"
            )
        return m
    if isinstance(obj, list):
        return _parse_rows(obj, origin)
    raise ParseError(f"{origin}: JSON payload must be an object or an array")


def read_matrix(source, fmt=None):
    """Read a square matrix from a path or inline JSON text."""
    stripped = source.strip()
    if stripped.startswith("["):
        try:
            obj = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ParseError(f"inline matrix: invalid JSON: {exc}") from exc
        return _read_json_matrix(obj, "inline matrix"), "<inline>"
    try:
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {source}: {exc}") from exc
    if fmt is None:
        fmt = "csv" if source.lower().endswith(".csv") else "json"
    if fmt == "csv":
        return _parse_rows(_read_csv(text, source), source), source
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: invalid JSON: {exc}") from exc
    return _read_json_matrix(obj, source), source


def symmetrize_input(m, origin, warnings):
    """Enforce the symmetric-input contract of the CLI.

    Asymmetry up to 1e-9 of the norm is repaired with a warning; anything
    larger is rejected.
    """
    asym = frobenius(m - m.T)
    scale = max(1.0, frobenius(m))
    if asym > _ASYM_TOL * scale:
        raise ParseError(
            f"{origin}: matrix is not symmetric (max asymmetry "
            f"{np.abs(m - m.T).max():.3e}, norm {scale:.3e})"
        )
    if asym > 0.0:
        warnings.append(
            f"{origin}: symmetrized input (asymmetry {asym:.3e})"
        )
    return (m + m.T) / 2.0


def _digest(m):
    payload = json.dumps(np.asarray(m, dtype=float).tolist()).encode()
    return hashlib.sha256(payload).hexdigest()


def _matrix_out(m):
    return np.asarray(m, dtype=float).tolist()


# ---------------------------------------------------------------------------
# Subspace specs


def parse_subspace_spec(spec, n):
    """Resolve "diag" | "block:p,q[,...]" | "antiblock:p,q" | "file:PATH"."""
    if spec == "diag":
        return diag_subspace(n), None
    if spec.startswith("block:"):
        sizes = _parse_sizes(spec)
        if sum(sizes) != n:
            raise DomainError(
                f"block sizes {sizes} sum to {sum(sizes)}, matrix dimension is {n}"
            )
        return block_diag_subspace(sizes), None
    if spec.startswith("antiblock:"):
        sizes = _parse_sizes(spec)
        if len(sizes) != 2:
            raise ParseError(f"antiblock spec needs exactly two sizes, got {spec!r}")
        if sum(sizes) != n:
            raise DomainError(
                f"antiblock sizes {sizes} sum to {sum(sizes)}, matrix dimension is {n}"
            )
        return block_antidiag_subspace(*sizes), None
    if spec.startswith("file:"):
        path = spec[len("file:") :]
        sub = load_subspace(path)
        if sub.n != n:
            raise DomainError(
                f"subspace ambient dimension {sub.n} != matrix dimension {n}"
            )
        return sub, path
    raise ParseError(
        f"unknown subspace spec {spec!r}; expected diag, block:..., antiblock:p,q "
        "or file:PATH"
    )


def _parse_sizes(spec):
    _, _, tail = spec.partition(":")
    try:
        sizes = [int(tok) for tok in tail.split(",") if tok]
    except ValueError as exc:
        raise ParseError(f"bad block sizes in {spec!r}: {exc}") from exc
    if not sizes:
        raise ParseError(f"no block sizes in {spec!r}")
    return sizes


def _lts_payload(report):
    payload = {
        "is_lts": report.is_lts,
        "max_residual": report.max_residual,
        "double_bracket_is_lts": report.double_bracket_is_lts,
        "double_bracket_residual": report.double_bracket_residual,
        "tol": report.tol,
    }
    if report.witness is not None:
        payload["witness"] = {
            "x": _matrix_out(report.witness.x),
            "y": _matrix_out(report.witness.y),
            "z": _matrix_out(report.witness.z),
            "residual": report.witness.residual,
            "off_component": _matrix_out(report.witness.off_component),
        }
    else:
        payload["witness"] = None
    return payload


# ---------------------------------------------------------------------------
# Command runners: params dict -> (inputs, outputs, diagnostics)


def _load_symmetric(params, key, warnings, fmt):
    m, origin = read_matrix(params[key], fmt)
    m = symmetrize_input(m, origin, warnings)
    return m, {"source": origin, "n": int(m.shape[0]), "sha256": _digest(m)}


def _opts(params):
    opts = {
        "tol": float(params.get("tol") or _default_tol()),
        "max_iter": int(params.get("max_iter") or 500),
    }
    if params.get("unchecked"):
        opts["unchecked"] = True
    return opts


def run_dist(params):
    warnings = []
    fmt = params.get("format")
    a, ia = _load_symmetric(params, "a", warnings, fmt)
    b, ib = _load_symmetric(params, "b", warnings, fmt)
    value = distance(a, b)
    return {"a": ia, "b": ib}, {"distance": value}, {"warnings": warnings}


def run_geodesic(params):
    warnings = []
    fmt = params.get("format")
    a, ia = _load_symmetric(params, "a", warnings, fmt)
    b, ib = _load_symmetric(params, "b", warnings, fmt)
    t = float(params.get("t", 0.5))
    point = geodesic(GeodesicSegment(a, b), t)
    return (
        {"a": ia, "b": ib},
        {"t": t, "point": _matrix_out(point)},
        {"warnings": warnings},
    )


def run_logm(params):
    warnings = []
    x, ix = _load_symmetric(params, "x", warnings, params.get("format"))
    return {"x": ix}, {"log": _matrix_out(spd_log(x))}, {"warnings": warnings}


def run_expm(params):
    warnings = []
    a, ia = _load_symmetric(params, "x", warnings, params.get("format"))
    return {"x": ia}, {"exp": _matrix_out(spd_exp(a))}, {"warnings": warnings}


def _with_partial(fn, outputs, *args, **kwargs):
    """Run fn, attaching already-built outputs to any raised error so the
    report can still carry them (e.g. the bracket-check witness)."""
    try:
        return fn(*args, **kwargs)
    except (ParseError, DomainError, ConvergenceError) as exc:
        exc.partial_outputs = outputs
        raise


def run_project(params):
    warnings = []
    x, ix = _load_symmetric(params, "x", warnings, params.get("format"))
    sub, path = parse_subspace_spec(params["subspace"], x.shape[0])
    outputs = {}
    if path is not None:
        report = lts_check(sub)
        outputs["lts"] = _lts_payload(report)
    result = _with_partial(geodesic_project, outputs, x, sub, **_opts(params))
    outputs["pi"] = _matrix_out(result.pi)
    diagnostics = {
        "iterations": result.iterations,
        "residual": result.residual,
        "warnings": warnings,
    }
    return {"x": ix, "subspace": params["subspace"]}, outputs, diagnostics


def run_mostow(params):
    warnings = []
    x, ix = _load_symmetric(params, "x", warnings, params.get("format"))
    sub, path = parse_subspace_spec(params["subspace"], x.shape[0])
    outputs = {}
    if path is not None:
        outputs["lts"] = _lts_payload(lts_check(sub))
    factors = _with_partial(mostow_spd, outputs, x, sub, **_opts(params))
    recon = frobenius(factors.e @ factors.f @ factors.e - x) / max(1.0, frobenius(x))
    outputs.update(
        {
            "e": _matrix_out(factors.e),
            "f": _matrix_out(factors.f),
            "pi": _matrix_out(factors.pi),
            "reconstruction_residual": recon,
        }
    )
    diagnostics = {
        "iterations": factors.iterations,
        "residual": factors.residual,
        "warnings": warnings,
    }
    return {"x": ix, "subspace": params["subspace"]}, outputs, diagnostics


def run_gl(params):
    warnings = []
    fmt = params.get("format")
    g, ig = read_matrix(params["g"], fmt)
    sub, path = parse_subspace_spec(params["g_subspace"], g.shape[0])
    outputs = {}
    if path is not None:
        outputs["lts"] = _lts_payload(lts_check(sub))
    factors = _with_partial(mostow_gl, outputs, g, sub, **_opts(params))
    recon = frobenius(factors.k @ factors.f @ factors.e - g) / max(1.0, frobenius(g))
    outputs.update(
        {
            "k": _matrix_out(factors.k),
            "f": _matrix_out(factors.f),
            "e": _matrix_out(factors.e),
            "reconstruction_residual": recon,
        }
    )
    diagnostics = {
        "iterations": factors.iterations,
        "residual": factors.residual,
        "warnings": warnings,
    }
    return (
        {"g": {"source": ig, "n": int(g.shape[0]), "sha256": _digest(g)},
         "subspace": params["g_subspace"]},
        outputs,
        diagnostics,
    )


def run_lts(params):
    spec = params["subspace"]
    if spec.startswith("file:"):
        sub = load_subspace(spec[len("file:") :])
    else:
        n = params.get("n")
        if n is None:
            raise ParseError("--n is required for built-in subspace specs")
        sub, _ = parse_subspace_spec(spec, int(n))
    tol = float(params.get("tol") or 1e-9)
    report = lts_check(sub, tol=tol)
    return (
        {"subspace": spec, "dim": sub.dim, "n": sub.n},
        _lts_payload(report),
        {"warnings": []},
    )


def run_curvature(params):
    warnings = []
    fmt = params.get("format")
    x, ix = _load_symmetric(params, "x", warnings, fmt)
    y, iy = _load_symmetric(params, "y", warnings, fmt)
    value = sectional_curvature_id(x, y)
    return (
        {"x": ix, "y": iy},
        {"sectional_curvature": value},
        {"warnings": warnings},
    )


_RUNNERS = {
    "dist": run_dist,
    "geodesic": run_geodesic,
    "logm": run_logm,
    "expm": run_expm,
    "project": run_project,
    "mostow": run_mostow,
    "gl": run_gl,
    "lts": run_lts,
    "curvature": run_curvature,
}


def _classify(exc):
    if isinstance(exc, ParseError):
        return EXIT_PARSE
    if isinstance(exc, ConvergenceError):
        return EXIT_NO_CONVERGENCE
    if isinstance(exc, DomainError):
        return EXIT_DOMAIN
    raise exc


def run_report(command, params):
    """Execute one command and wrap the outcome in a report dict."""
    report = {
        "command": command,
        "params": {k: v for k, v in params.items() if v is not None},
        "inputs": {},
        "outputs": {},
        "diagnostics": {"iterations": None, "residual": None, "warnings": []},
        "exit_code": EXIT_OK,
    }
    try:
        runner = _RUNNERS[command]
    except KeyError:
        report["exit_code"] = EXIT_PARSE
        report["error"] = {"type": "parse", "message": f"unknown command {command!r}"}
        return report
    try:
        inputs, outputs, diagnostics = runner(params)
    except (ParseError, DomainError, ConvergenceError) as exc:
        code = _classify(exc)
        report["exit_code"] = code
        report["error"] = {
            "type": {2: "parse", 3: "domain", 4: "non-convergence"}[code],
            "message": str(exc),
        }
        residual = getattr(exc, "residual", None)
        if residual is not None:
            report["diagnostics"]["residual"] = float(residual)
        partial = getattr(exc, "partial_outputs", None)
        if partial:
            report["outputs"] = partial
        return report
    report["inputs"] = inputs
    report["outputs"] = outputs
    report["diagnostics"].update(diagnostics)
    return report


def run_batch(manifest_path):
    """Process a JSON array of command objects, one report per entry."""
    try:
        with open(manifest_path, "r", encoding="utf-8") as fh:
            entries = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read manifest {manifest_path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in manifest {manifest_path}: {exc}") from exc
    if not isinstance(entries, list):
        raise ParseError("batch manifest must be a JSON array of command objects")
    reports = []
    for idx, entry in enumerate(entries):
        if not isinstance(entry, dict) or "command" not in entry:
            reports.append(
                {
                    "command": None,
                    "params": {},
                    "inputs": {},
                    "outputs": {},
                    "diagnostics": {"iterations": None, "residual": None,
                                    "warnings": []},
                    "exit_code": EXIT_PARSE,
                    "error": {
                        "type": "parse",
                        "message": f"entry {idx} is not a command object",
                    },
                }
            )
            continue
        params = {k: v for k, v in entry.items() if k != "command"}
        reports.append(run_report(entry["command"], params))
    return reports


# ---------------------------------------------------------------------------
# Argument parsing


def build_parser():
    parser = argparse.ArgumentParser(
        prog="spd",
        description=(
            "Geometry of symmetric positive-definite matrices: distances, "
            "geodesics, matrix exp/log, geodesic projection and two-sided "
            "factorizations."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, project_opts=False):
        p.add_argument("--format", choices=["json", "csv"], default=None,
                       help="input file format (default: by extension)")
        if project_opts:
            p.add_argument("--tol", type=float, default=None,
                           help="convergence tolerance (or env SPD_TOL)")
            p.add_argument("--max-iter", dest="max_iter", type=int, default=None)
            p.add_argument("--unchecked", action="store_true",
                           help="skip the bracket-closure check of the subspace")

    p = sub.add_parser("dist", help="geodesic distance between two matrices")
    p.add_argument("a")
    p.add_argument("b")
    add_common(p)

    p = sub.add_parser("geodesic", help="point on the geodesic between two matrices")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--t", type=float, default=0.5)
    add_common(p)

    p = sub.add_parser("logm", help="matrix logarithm")
    p.add_argument("x")
    add_common(p)

    p = sub.add_parser("expm", help="matrix exponential of a symmetric matrix")
    p.add_argument("x")
    add_common(p)

    p = sub.add_parser("project", help="geodesic projection onto exp(E)")
    p.add_argument("x")
    p.add_argument("subspace")
    add_common(p, project_opts=True)

    p = sub.add_parser("mostow", help="two-sided factorization x = e f e")
    p.add_argument("x")
    p.add_argument("subspace")
    add_common(p, project_opts=True)

    p = sub.add_parser("gl", help="factorization g = k f e with k orthogonal")
    p.add_argument("g")
    p.add_argument("g_subspace", metavar="subspace")
    add_common(p, project_opts=True)

    p = sub.add_parser("lts", help="bracket-closure check of a subspace")
    p.add_argument("subspace")
    p.add_argument("--n", type=int, default=None,
                   help="ambient dimension for built-in specs")
    p.add_argument("--tol", type=float, default=None)

    p = sub.add_parser("curvature", help="sectional curvature at the identity")
    p.add_argument("x")
    p.add_argument("y")
    add_common(p)

    p = sub.add_parser("batch", help="run a JSON manifest of commands")
    p.add_argument("manifest")

    return parser


def main(argv=None):
    """Entry point; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    command = args.command

    try:
        if command == "batch":
            reports = run_batch(args.manifest)
            print(json.dumps(reports, indent=2))
            for rep in reports:
                if rep["exit_code"] != EXIT_OK:
                    print(
                        f"spd: batch entry failed: {rep.get('error', {}).get('message', '?')}",
                        file=sys.stderr,
                    )
            codes = [rep["exit_code"] for rep in reports]
            return next((c for c in codes if c != EXIT_OK), EXIT_OK)
        params = {k: v for k, v in vars(args).items() if k != "command"}
        report = run_report(command, params)
    except ParseError as exc:
        print(f"spd: {exc}", file=sys.stderr)
        return EXIT_PARSE

    print(json.dumps(report, indent=2))
    if report["exit_code"] != EXIT_OK:
        print(f"spd: {report['error']['message']}", file=sys.stderr)
    return report["exit_code"]


def console_entry():
    sys.exit(main())
