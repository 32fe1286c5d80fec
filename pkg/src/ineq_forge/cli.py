"""Command-line front end.

Exit codes: 0 success, 1 numerical failure, 2 bad flags, specs or config,
3 a warping condition is violated, 4 an inequality deficit is negative beyond
tolerance (or a heat self-test fails).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import constants as C
from . import heat
from .errors import ConditionViolated, DimensionError, IneqError, NonConvergent, NonFinite
from .manifold import (ManifoldModel, check_conditions, kernel_on_radius,
                       parse_warping, phi)
from .numerics import DEFAULT_QUADRATURE, QuadratureConfig
from .profiles import parse_profile
from .reports import REPORT_FIELDS, InequalityReport
from .verify import InequalityId, SkippedItem, condition_scan, verify, verify_suite

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE, EXIT_CONDITION, EXIT_DEFICIT = 0, 1, 2, 3, 4
OUTPUT_ENV = "INEQ_FORGE_OUTPUT"
KERNEL_COLUMNS = ("t", "psi", "phi", "k", "quotient")


class UsageError(Exception):
    """Invalid flags or config; reported on stderr with exit code 2."""


# Serialization.

def _clean(obj):
    """Replace non-finite floats by None and numpy scalars by Python ones."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(obj) -> str:
    """JSON with round-trip float repr and null for NaN/inf."""
    return json.dumps(_clean(obj), indent=2, allow_nan=False) + "\n"


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x) if math.isfinite(x) else ""
    return str(x)


def _csv_text(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(obj) -> None:
    sys.stdout.write(dumps(obj))


def _output_dir(default) -> Path:
    return Path(os.environ.get(OUTPUT_ENV) or default)


# Subcommands.

def _manifold(spec: str, dim: int) -> ManifoldModel:
    return parse_warping(spec, dim)


def cmd_constants(args) -> int:
    N, p = args.dim, args.p
    if N < 2:
        raise UsageError("--dim must be at least 2")
    if not 1 < p < N:
        raise UsageError(f"--p must satisfy 1 < p < N = {N}")
    m = _manifold(args.manifold, N) if args.manifold else None
    out, tags = {}, {}
    if m is None or m.is_hyperbolic:
        out["poincare"] = C.poincare_constant(N, p)
        tags["poincare"] = "((N-1)/p)^p"
    if p >= 2:
        hyper = m is None or (m.is_hyperbolic and m.scale == 1.0)
        if m is not None and m.is_euclidean:
            out["lambda_log"] = 0.0
            tags["lambda_log"] = "zero_kernel"
        else:
            out["lambda_log"] = C.lambda_log(N, p, m)
            tags["lambda_log"] = ("N^2(N-1)/(4(N+2))" if hyper and p == 2
                                  else "C(N,p)*(N/p)^p")
    out["L_Np"] = C.log_sobolev_constant(N, p)
    tags["L_Np"] = "euclidean_lp_log_sobolev"
    out["S_Np"] = C.sharp_sobolev_constant(N, p)
    tags["S_Np"] = "aubin_talenti"
    if args.alpha is not None:
        gn = C.gn_constant(C.ExponentParams(N, p, args.alpha))
        key = "GN1" if gn.branch == "alpha_gt_1" else "GN2"
        out[key] = gn.constant
        out["GN_theta"] = gn.theta
        tags[key] = f"gagliardo_nirenberg_{gn.branch}"
        tags["GN_theta"] = "interpolation_exponent"
    if N >= 3:
        out["C2"] = C.gaussian_c2(N)
        tags["C2"] = "gaussian_potential_constant"
    out["G"] = C.gaussian_normalization(N)
    tags["G"] = "erf_series"
    out["formulas"] = tags
    _emit(out)
    return EXIT_OK


def cmd_kernel(args) -> int:
    if args.grid < 10:
        raise UsageError("--grid must be at least 10")
    if not args.tmax > 0:
        raise UsageError("--tmax must be positive")
    m = _manifold(args.manifold, args.dim)
    p = args.p
    ts = np.linspace(args.tmax / args.grid, args.tmax, args.grid)
    m.check_radius(ts)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        psi = np.asarray(m.psi(ts), dtype=float)
        ph = np.asarray(phi(m, ts), dtype=float)
        k = kernel_on_radius(m, p, ts)
        quotient = C.correction_quotient(m, p, ts)
    rows = zip(*(a.tolist() for a in (ts, psi, ph, k, quotient)))
    csv_path = Path(args.csv) if args.csv else _output_dir(".") / "kernel.csv"
    atomic_write(csv_path, _csv_text(KERNEL_COLUMNS, rows))

    zero, inf = C.quotient_limits(m, p)
    summary = {"manifold": m.label, "N": m.dim, "p": p, "csv": str(csv_path),
               "limit_zero": zero, "limit_infinity": inf}
    code = EXIT_OK
    try:
        cc = C.correction_lower_constant(m, p, (float(ts[0]), float(ts[-1]), args.grid))
        summary.update(C=cc.C, argmin=cc.argmin, grid_min=cc.grid_min,
                       kernel_positive=cc.kernel_positive, witness=None)
    except ConditionViolated as exc:
        summary.update(C=None, argmin=None, grid_min=None, kernel_positive=False,
                       witness=list(exc.witness) if exc.witness else None)
        print(f"ineq-forge: {exc}", file=sys.stderr)
        code = EXIT_CONDITION
    _emit(summary)
    return code


def cmd_conditions(args) -> int:
    m = _manifold(args.manifold, args.dim)
    scan = condition_scan(m)
    if args.tmin is not None or args.tmax is not None or args.grid is not None:
        scan = (args.tmin if args.tmin is not None else scan[0],
                args.tmax if args.tmax is not None else scan[1],
                args.grid if args.grid is not None else scan[2])
    reports = check_conditions(m, args.p, scan)
    _emit({"manifold": m.label, "N": m.dim, "p": args.p,
           "conditions": [r.to_dict() for r in reports]})
    return EXIT_OK if all(r.passed for r in reports) else EXIT_CONDITION


def _params_from_flags(args) -> C.ExponentParams:
    return C.ExponentParams(args.dim, args.p, alpha=args.alpha, q=args.q, s=args.s,
                            lam=args.lam, b=args.b)


def cmd_verify(args) -> int:
    iid = InequalityId(args.inequality)
    spec = args.manifold or ("id" if iid is InequalityId.EUCLIDEAN_LOG_SOBOLEV else "sinh")
    m = _manifold(spec, args.dim)
    u = parse_profile(args.profile)
    report = verify(iid, u, m, _params_from_flags(args), gaussian_method=args.gaussian_method)
    _emit(report.to_dict())
    return EXIT_OK if report.passed else EXIT_DEFICIT


def cmd_heat(args) -> int:
    dims = [args.dim] if args.dim else list(heat.SUPPORTED_DIMS)
    results, ok = [], True
    for N in dims:
        spec = heat.HeatKernelSpec(N, 1.0, args.alpha)
        norms = {repr(t): heat.heat_normalization(heat.HeatKernelSpec(N, t)) for t in args.times}
        residual = heat.heat_pde_residual(spec)
        ck = []
        for s, t in ((0.5, 0.5), (0.3, 0.7), (1.0, 1.0)):
            lhs, rhs = heat.chapman_kolmogorov_origin(spec, s, t)
            ck.append({"s": s, "t": t, "lhs": lhs, "rhs": rhs})
        entry = {"N": N, "normalization": norms, "pde_residual": residual,
                 "chapman_kolmogorov": ck,
                 "p_origin_t1": float(heat.heat_kernel_value(N, 0.0, 1.0))}
        passed = (all(abs(v - 1) <= 1e-6 for v in norms.values()) and residual <= 1e-4
                  and all(abs(c["lhs"] - c["rhs"]) <= 1e-5 for c in ck))
        entry["passed"] = passed
        ok &= passed
        results.append(entry)
    _emit(results)
    return EXIT_OK if ok else EXIT_DEFICIT


# Config runner.

_CONFIG_KEYS = {"manifolds", "profiles", "suites", "quadrature", "output_dir",
                "gaussian_method", "workers"}
_SUITE_KEYS = {"id", "params", "manifolds", "profiles"}
_PARAM_KEYS = {"p", "alpha", "q", "s", "lambda", "b"}


@dataclass
class SuiteSpec:
    id: InequalityId
    params: list[dict]
    manifolds: list[ManifoldModel]
    profiles: list


@dataclass
class RunConfig:
    suites: list[SuiteSpec]
    quadrature: QuadratureConfig = DEFAULT_QUADRATURE
    output_dir: str = "ineq_forge_out"
    gaussian_method: str = "series"
    workers: Optional[int] = None
    manifolds: list[ManifoldModel] = field(default_factory=list)


def _parse_manifold_entry(entry) -> ManifoldModel:
    if not isinstance(entry, dict) or set(entry) != {"warping", "dim"}:
        raise UsageError(f"manifold entries need exactly 'warping' and 'dim': {entry!r}")
    try:
        return parse_warping(str(entry["warping"]), int(entry["dim"]))
    except (IneqError, ValueError) as exc:
        raise UsageError(f"bad manifold {entry!r}: {exc}") from exc


def _parse_profiles(specs) -> list:
    out = []
    for spec in specs:
        try:
            out.append(parse_profile(str(spec)))
        except (IneqError, ValueError, OSError) as exc:
            raise UsageError(f"unknown or invalid profile {spec!r}: {exc}") from exc
    return out


def load_config(path) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise UsageError("config must be a JSON object")
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    manifolds = [_parse_manifold_entry(e) for e in raw.get("manifolds", [])]
    profiles = _parse_profiles(raw.get("profiles", []))
    suites = []
    for s in raw.get("suites", []):
        if not isinstance(s, dict) or "id" not in s or set(s) - _SUITE_KEYS:
            raise UsageError(f"suite entries take keys {sorted(_SUITE_KEYS)}: {s!r}")
        try:
            iid = InequalityId(s["id"])
        except ValueError as exc:
            raise UsageError(f"unknown inequality id {s['id']!r}") from exc
        params = s.get("params", [])
        for par in params:
            if not isinstance(par, dict) or "p" not in par or set(par) - _PARAM_KEYS:
                raise UsageError(f"params need 'p' and only {sorted(_PARAM_KEYS)}: {par!r}")
        ms = ([_parse_manifold_entry(e) for e in s["manifolds"]] if "manifolds" in s
              else manifolds)
        ps = _parse_profiles(s["profiles"]) if "profiles" in s else profiles
        suites.append(SuiteSpec(iid, params, ms, ps))
    try:
        quad = QuadratureConfig(**raw.get("quadrature", {}))
    except (TypeError, IneqError) as exc:
        raise UsageError(f"bad quadrature settings: {exc}") from exc
    method = raw.get("gaussian_method", "series")
    if method not in ("series", "quadrature"):
        raise UsageError(f"gaussian_method must be 'series' or 'quadrature', got {method!r}")
    return RunConfig(suites, quad, str(raw.get("output_dir", "ineq_forge_out")), method,
                     raw.get("workers"), manifolds)


def _exponents(par: dict, N: int) -> C.ExponentParams:
    return C.ExponentParams(N, par["p"], alpha=par.get("alpha"), q=par.get("q"),
                            s=par.get("s"), lam=par.get("lambda"), b=par.get("b"))


def run_config(cfg: RunConfig) -> tuple[list, list[SkippedItem], list[dict]]:
    entries = []
    audits: dict[tuple[str, float], dict] = {}
    for suite in cfg.suites:
        for m in suite.manifolds:
            grid = [_exponents(par, m.dim) for par in suite.params]
            entries.extend(verify_suite([suite.id], suite.profiles, m, grid, cfg.quadrature,
                                        cfg.workers, cfg.gaussian_method))
            for par in grid:
                key = (m.label, par.p)
                if key not in audits and m.dim >= 3 and par.p >= m.dim / (m.dim - 1):
                    reports = check_conditions(m, par.p, condition_scan(m))
                    audits[key] = {"manifold": m.label, "N": m.dim, "p": par.p,
                                   "conditions": [r.to_dict() for r in reports]}
    reports = [e for e in entries if isinstance(e, InequalityReport)]
    skipped = [e for e in entries if isinstance(e, SkippedItem)]
    return reports, skipped, [audits[k] for k in sorted(audits, key=lambda k: (k[0], k[1]))]


def write_outputs(out_dir: Path, reports, skipped, audits) -> dict:
    failed = sum(not r.passed for r in reports)
    summary = {"total": len(reports) + len(skipped), "passed": len(reports) - failed,
               "failed": failed, "skipped": len(skipped)}
    rows = [[r.to_dict().get(col) for col in REPORT_FIELDS] for r in reports]
    files = {
        "reports.json": dumps([r.to_dict() for r in reports]),
        "reports.csv": _csv_text(REPORT_FIELDS, rows),
        "conditions.json": dumps(audits),
        "skipped.json": dumps([s.to_dict() for s in skipped]),
        "summary.json": dumps(summary),
    }
    for name, text in files.items():
        atomic_write(out_dir / name, text)
    return summary


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    reports, skipped, audits = run_config(cfg)
    out_dir = _output_dir(cfg.output_dir)
    summary = write_outputs(out_dir, reports, skipped, audits)
    _emit({**summary, "output_dir": str(out_dir)})
    return EXIT_DEFICIT if summary["failed"] else EXIT_OK


# Entry point.

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ineq-forge",
                                     description="Sharp constants, correction kernels and "
                                                 "inequality checks on model manifolds.")
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("constants", help="print the constants for (N, p) as JSON")
    c.add_argument("--dim", type=int, required=True)
    c.add_argument("--p", type=float, required=True)
    c.add_argument("--alpha", type=float)
    c.add_argument("--manifold", help="warping spec; hyperbolic space by default")
    c.set_defaults(func=cmd_constants)

    k = sub.add_parser("kernel", help="tabulate the correction kernel and quotient")
    k.add_argument("--manifold", required=True)
    k.add_argument("--dim", type=int, required=True)
    k.add_argument("--p", type=float, required=True)
    k.add_argument("--tmax", type=float, default=10.0)
    k.add_argument("--grid", type=int, default=400)
    k.add_argument("--csv", help=f"table path (default: kernel.csv in ${OUTPUT_ENV} or .)")
    k.set_defaults(func=cmd_kernel)

    a = sub.add_parser("conditions", help="audit the warping conditions on a grid")
    a.add_argument("--manifold", required=True)
    a.add_argument("--dim", type=int, required=True)
    a.add_argument("--p", type=float, required=True)
    a.add_argument("--tmin", type=float)
    a.add_argument("--tmax", type=float)
    a.add_argument("--grid", type=int)
    a.set_defaults(func=cmd_conditions)

    v = sub.add_parser("verify", help="evaluate one inequality on one profile")
    v.add_argument("--inequality", required=True, choices=[i.value for i in InequalityId])
    v.add_argument("--profile", required=True)
    v.add_argument("--dim", type=int, required=True)
    v.add_argument("--p", type=float, required=True)
    v.add_argument("--alpha", type=float)
    v.add_argument("--q", type=float)
    v.add_argument("--s", type=float)
    v.add_argument("--lambda", dest="lam", type=float)
    v.add_argument("--b", type=float)
    v.add_argument("--manifold", help="warping spec (default: sinh, or id for the Euclidean "
                                      "log-Sobolev inequality)")
    v.add_argument("--gaussian-method", choices=("series", "quadrature"), default="series")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("run", help="run a JSON config and write the report directory")
    r.add_argument("--config", required=True)
    r.set_defaults(func=cmd_run)

    h = sub.add_parser("heat", help="heat-kernel self-tests")
    h.add_argument("--dim", type=int, choices=heat.SUPPORTED_DIMS)
    h.add_argument("--alpha", type=float, default=1.0)
    h.add_argument("--times", type=float, nargs="+", default=[0.25, 0.5, 1.0, 2.0, 4.0])
    h.set_defaults(func=cmd_heat)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConditionViolated as exc:
        print(f"ineq-forge: {exc}", file=sys.stderr)
        return EXIT_CONDITION
    except (NonConvergent, NonFinite) as exc:
        print(f"ineq-forge: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, IneqError, DimensionError, ValueError) as exc:
        print(f"ineq-forge: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
