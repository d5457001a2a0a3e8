"""Command-line front end.

Exit codes: 0 success, 1 internal error, 2 partial convergence,
3 reference mismatch, 64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from typing import Sequence

import numpy as np

from . import comparison
from .eigensolver import ScanConfig, plateau_scan, spectrum, wavefunction_model
from .errors import AimError, DomainError, WavefunctionUnavailableError
from .jets import Precision
from .oracle import OracleConfig, oracle_spectrum
from .potential import PotentialParams, characteristic_exponents, make_well_problem, to_y, v_of_x
from .reference import GROUPS

EXIT_OK, EXIT_INTERNAL, EXIT_PARTIAL, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2, 3, 64
SPECTRUM_KEYS = ("index", "energy", "converged", "iterations", "residual", "warnings")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _default_digits() -> int:
    raw = os.environ.get("AIM_PRECISION")
    if raw is None:
        return 30
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"AIM_PRECISION must be an integer, got {raw!r}")


def _num(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    if isinstance(v, (list, tuple)):
        return ";".join(_num(x) for x in v)
    return str(v)


def _jsonable(v):
    if isinstance(v, (np.floating,)):
        v = float(v)
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    return v


def emit(fmt: str, settings: dict, columns: Sequence[str], rows: list[dict], warnings: list[str],
         out=None, summary: dict | None = None) -> None:
    out = out or sys.stdout
    if fmt == "json":
        doc = {"settings": settings, "results": rows, "warnings": warnings}
        if summary:
            doc["summary"] = summary
        json.dump(_jsonable(doc), out, indent=2)
        out.write("\n")
        return
    if fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_num(r.get(c)) for c in columns])
        return
    cells = [[_num(r.get(c)) for c in columns] for r in rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(columns)]
    out.write("  ".join(c.ljust(wd) for c, wd in zip(columns, widths)).rstrip() + "\n")
    for row in cells:
        out.write("  ".join(v.ljust(wd) for v, wd in zip(row, widths)).rstrip() + "\n")
    for k, v in (summary or {}).items():
        out.write(f"# {k}: {_num(v) if not isinstance(v, str) else v}\n")
    for note in warnings:
        out.write(f"# warning: {note}\n")


# -- argument groups ------------------------------------------------------------

def _add_params(p):
    p.add_argument("--A", type=float, default=4.0)
    p.add_argument("--B", type=float, default=4.0)
    p.add_argument("--C", type=float, default=8.0)
    p.add_argument("--L", type=float, default=2.0)


def _add_format(p, default="text"):
    p.add_argument("--format", choices=("text", "csv", "json"), default=default)


def _add_scan(p):
    p.add_argument("--y0", type=float, default=0.0)
    p.add_argument("--nmax", type=int, default=comparison.CONVERGED_DEPTH)
    p.add_argument("--precision", type=int, default=None, help="decimal digits (default $AIM_PRECISION or 30)")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--emin", type=float, default=None)
    p.add_argument("--emax", type=float, default=None)
    p.add_argument("--grid", type=int, default=2000)
    p.add_argument("--formulation", choices=("asymptotic", "plain"), default="asymptotic")
    p.add_argument("--origin", choices=("dirichlet", "even"), default="dirichlet")


def _params(args) -> PotentialParams:
    try:
        return PotentialParams(args.A, args.B, args.C, args.L)
    except DomainError as exc:
        raise UsageError(str(exc))


def _precision(args) -> Precision:
    digits = args.precision if getattr(args, "precision", None) is not None else _default_digits()
    try:
        return Precision(digits)
    except ValueError as exc:
        raise UsageError(str(exc))


def _default_window(params: PotentialParams, warnings: list) -> tuple[float, float]:
    """Start just below min V (a lower bound on every level when both ends are subcritical)."""
    if characteristic_exponents(params).any_supercritical:
        warnings.append("supercritical coupling: V is unbounded below; default window starts at E = -10")
        return -10.0, 80.0
    x = np.linspace(0, params.L, 4002)[1:-1]
    lo = math.floor(float(np.min(v_of_x(params, x)))) - 1.0
    return lo, lo + 50.0


def _scan_config(args, params, warnings) -> ScanConfig:
    lo, hi = _default_window(params, warnings)
    lo = args.emin if args.emin is not None else lo
    hi = args.emax if args.emax is not None else max(hi, lo + 1.0)
    try:
        return ScanConfig(lo, hi, args.grid, args.y0, args.nmax, args.tol, _precision(args))
    except (ValueError, DomainError) as exc:
        raise UsageError(str(exc))


def _settings(args, params, cfg: ScanConfig | None = None) -> dict:
    s = {"A": params.A, "B": params.B, "C": params.C, "L": params.L}
    if cfg is not None:
        s.update(precision=cfg.precision.decimal_digits, n_max=cfg.n_max, y0=cfg.y0, tol=cfg.tol,
                 e_min=cfg.e_min, e_max=cfg.e_max, grid_points=cfg.grid_points,
                 formulation=args.formulation, origin=args.origin)
    return s


# -- commands -------------------------------------------------------------------

def cmd_spectrum(args) -> int:
    params = _params(args)
    warnings: list[str] = []
    cfg = _scan_config(args, params, warnings)
    if args.k < 1:
        raise UsageError("--k must be >= 1")
    res = spectrum(params, args.k, cfg, args.formulation, args.origin)
    rows = [{"index": r.index, "energy": r.energy, "converged": r.converged, "iterations": r.iterations_used,
             "residual": r.delta_residual, "warnings": list(r.warnings)} for r in res]
    warnings.extend(res.notes)
    for r in res:
        for w in r.warnings:
            if w not in warnings:
                warnings.append(w)
    emit(args.format, _settings(args, params, cfg), SPECTRUM_KEYS, rows, warnings)
    full = res.complete and all(r.converged for r in res)
    return EXIT_OK if full else EXIT_PARTIAL


TABLE_KEYS = ("table", "mode", "index", "computed", "reference", "abs_diff", "rel_diff", "tolerance",
              "pass", "informational", "converged", "published", "note")


def cmd_tables(args) -> int:
    prec = _precision(args)
    labels = GROUPS[args.which]
    modes = comparison.MODES if args.mode == "both" else (args.mode,)
    rows, warnings, failing = [], [], []
    for mode in modes:
        for rep in comparison.compare_group(labels, mode, prec):
            for r in rep.rows:
                rows.append({"table": rep.label, "mode": mode, "index": r.index, "computed": r.computed,
                             "reference": r.reference, "abs_diff": r.abs_diff, "rel_diff": r.rel_diff,
                             "tolerance": r.tolerance, "pass": r.passed, "informational": r.informational,
                             "converged": r.converged, "published": r.published, "note": r.note})
            warnings.extend(f"{rep.label}/{mode}: {n}" for n in rep.notes)
            failing.extend(f"{rep.label}/{mode} row {r.index}" for r in rep.failing)
    judged = [r for r in rows if not r["informational"]]
    summary = {"judged": len(judged), "passed": sum(bool(r["pass"]) for r in judged)}
    if failing:
        warnings.append("failing rows: " + ", ".join(failing))
    settings = {"which": args.which, "modes": list(modes), "precision": prec.decimal_digits,
                "reproduction_depth": comparison.REPRODUCTION_DEPTH,
                "converged_depth": comparison.CONVERGED_DEPTH, "y0": 0.0, "tol": 1e-8}
    emit(args.format, settings, TABLE_KEYS, rows, warnings, summary=summary)
    return EXIT_MISMATCH if failing else EXIT_OK


def cmd_potential(args) -> int:
    params = _params(args)
    eps = 1e-3 * params.L
    lo = args.xmin if args.xmin is not None else eps
    hi = args.xmax if args.xmax is not None else params.L - eps
    if not 0 < lo < hi < params.L:
        raise UsageError(f"sample range must lie inside (0, {params.L}) with xmin < xmax")
    if args.samples < 2:
        raise UsageError("--samples must be >= 2")
    x = np.linspace(lo, hi, args.samples)
    v = np.atleast_1d(v_of_x(params, x))
    rows = [{"x": float(a), "V": float(b)} for a, b in zip(x, v)]
    emit(args.format, _settings(args, params), ("x", "V"), rows, [])
    return EXIT_OK


def _grids(text: str) -> tuple:
    try:
        return tuple(int(t) for t in text.replace(" ", "").split(",") if t)
    except ValueError:
        raise UsageError(f"--grids must be a comma-separated list of integers, got {text!r}")


def cmd_oracle(args) -> int:
    params = _params(args)
    try:
        cfg = OracleConfig(_grids(args.grids), args.k, args.extrapolate, args.origin)
    except ValueError as exc:
        raise UsageError(str(exc))
    spec = oracle_spectrum(params, cfg)
    cols = ["index"] + [f"M{m}" for m in cfg.grid_sizes] + ["extrapolated", "order", "cutoff_sensitivity"]
    rows = []
    for i in range(cfg.k):
        row = {"index": i}
        for j, m in enumerate(cfg.grid_sizes):
            row[f"M{m}"] = float(spec.per_grid[j, i])
        row["extrapolated"] = None if spec.extrapolated is None else float(spec.extrapolated[i])
        row["order"] = float(spec.convergence_order_estimate[i])
        row["cutoff_sensitivity"] = float(spec.cutoff_sensitivity[i])
        rows.append(row)
    warnings = []
    if characteristic_exponents(params).any_supercritical:
        warnings.append("supercritical: regularization-dependent")
    settings = _settings(args, params)
    settings.update(grids=list(cfg.grid_sizes), extrapolate=cfg.extrapolate, origin=cfg.origin)
    emit(args.format, settings, cols, rows, warnings)
    return EXIT_OK


def _y0range(text: str) -> tuple[float, float]:
    try:
        a, b = text.split(":")
        return float(a), float(b)
    except ValueError:
        raise UsageError(f"--y0range must look like LOW:HIGH, got {text!r}")


def _locate_state(params, state: int, args, warnings):
    cfg = _scan_config(args, params, warnings)
    res = spectrum(params, state + 1, cfg, args.formulation, args.origin)
    if len(res) <= state:
        raise AimError(f"state {state} not found")
    return res, cfg


def cmd_plateau(args) -> int:
    params = _params(args)
    warnings: list[str] = []
    lo, hi = _y0range(args.y0range)
    res, cfg = _locate_state(params, args.state, args, warnings)
    e = res[args.state].energy
    gaps = [b.energy - a.energy for a, b in zip(res, res[1:])] or [1.0]
    # the level moves far less than this across a plateau
    half = min(0.25 * min(gaps), 1e-3 * max(1.0, abs(e)))
    base = ScanConfig(e - half, e + half, 4, cfg.y0, cfg.n_max, cfg.tol, cfg.precision)
    problem = make_well_problem(params, args.formulation, args.origin)
    try:
        rep = plateau_scan(problem, base, lo, hi, args.samples, 0)
    except DomainError as exc:
        raise UsageError(str(exc))
    rows = [{"y0": float(y), "energy": None if np.isnan(v) else float(v)} for y, v in zip(rep.y0_samples, rep.energies)]
    summary = {"plateau_range": list(rep.plateau_range) if rep.plateau_range else None,
               "max_spread_on_plateau": rep.max_spread_on_plateau,
               "missing_samples": int(np.isnan(rep.energies).sum())}
    if args.format == "text":
        summary["plateau_range"] = _num(summary["plateau_range"])
    settings = _settings(args, params, cfg)
    settings.update(state=args.state, y0range=[lo, hi], samples=args.samples)
    emit(args.format, settings, ("y0", "energy"), rows, warnings, summary=summary)
    return EXIT_OK if summary["missing_samples"] == 0 else EXIT_PARTIAL


def cmd_wavefunction(args) -> int:
    params = _params(args)
    warnings: list[str] = []
    res, cfg = _locate_state(params, args.state, args, warnings)
    model = wavefunction_model(params, res[args.state], precision=cfg.precision)
    x = np.linspace(0, params.L, args.samples + 2)[1:-1]
    psi = model.at_x(x)
    rows = [{"x": float(a), "y": float(to_y(a, params.L)), "psi": float(p)} for a, p in zip(x, psi)]
    summary = {"energy": float(model.energy), "nodes": model.node_count(),
               "norm_quadrature_error": model.norm_error}
    settings = _settings(args, params, cfg)
    settings.update(state=args.state, samples=args.samples)
    emit(args.format, settings, ("x", "y", "psi"), rows, warnings, summary=summary)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="aimwell", description="AIM eigenvalues of the infinite well with a non-flat bottom")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("spectrum", help="lowest k eigenvalues")
    _add_params(p)
    _add_scan(p)
    p.add_argument("--k", type=int, default=10)
    _add_format(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("tables", help="recompute the embedded reference tables and diff them")
    p.add_argument("--which", choices=("1", "2", "3", "all"), default="all")
    p.add_argument("--mode", choices=comparison.MODES + ("both",), default="reproduction")
    p.add_argument("--precision", type=int, default=None)
    _add_format(p)
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("potential", help="sample V(x) for plotting")
    _add_params(p)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--xmin", type=float, default=None)
    p.add_argument("--xmax", type=float, default=None)
    _add_format(p, default="csv")
    p.set_defaults(func=cmd_potential)

    p = sub.add_parser("oracle", help="finite-difference reference spectrum")
    _add_params(p)
    p.add_argument("--grids", default="1024,2048,4096")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--extrapolate", action="store_true")
    p.add_argument("--origin", choices=("dirichlet", "neumann"), default="dirichlet")
    _add_format(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("plateau", help="eigenvalue of one state against the evaluation point y0")
    _add_params(p)
    _add_scan(p)
    p.add_argument("--state", type=int, default=0)
    p.add_argument("--y0range", default="-0.3:0.3")
    p.add_argument("--samples", type=int, default=11)
    _add_format(p)
    # off-centre Delta_N shrinks geometrically with N; a shallower default keeps 30 digits sufficient
    p.set_defaults(func=cmd_plateau, nmax=60)

    p = sub.add_parser("wavefunction", help="normalized wavefunction samples (experimental)")
    _add_params(p)
    _add_scan(p)
    p.add_argument("--state", type=int, default=0)
    p.add_argument("--samples", type=int, default=101)
    _add_format(p)
    p.set_defaults(func=cmd_wavefunction)
    return parser


def _glue_ranges(argv: list[str]) -> list[str]:
    # "--y0range -0.3:0.3" would otherwise be parsed as an unknown option
    out, i = [], 0
    while i < len(argv):
        if argv[i] == "--y0range" and i + 1 < len(argv):
            out.append(f"--y0range={argv[i + 1]}")
            i += 2
            continue
        out.append(argv[i])
        i += 1
    return out


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_glue_ranges(argv))
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"aimwell: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except WavefunctionUnavailableError as exc:
        print(f"aimwell: wavefunction unavailable: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (AimError, ArithmeticError, ValueError) as exc:
        print(f"aimwell: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
