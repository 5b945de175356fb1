"""Command-line front end: bound sweeps, endpoint reports, BA curves, verification.

Subcommands
-----------
bounds   sweep selected bounds over a slope or distortion grid (CSV/JSON)
dmax     report the zero-crossing of the lower bound and both zero-rate
         distortions, asserting their ordering
ba       Blahut-Arimoto sweep only (same table schema)
verify   cross-module consistency checks; exit 0 iff all pass

The CSV schema is fixed: ``s,D,R_slb,R_u,R_au,R_ge,R_trivial,R_ba,flags``.
Rates are nats by default (--units bits divides by ln 2 on output).  Values
clamped to zero keep their raw value inside the flags column, e.g.
``rge_clamped:-0.43``.  Inapplicable or failed cells are left empty and
flagged rather than aborting the sweep.  Exit codes: 0 success, 1 invariant
failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import ba as ba_mod
from . import bounds as bounds_mod
from .sources import Gaussian, Laplacian, Source, load_tabulated_csv
from .tilted import EpsilonLoss, distortion_of_slope, slope_of_distortion

COLUMNS = ["s", "D", "R_slb", "R_u", "R_au", "R_ge", "R_trivial", "R_ba", "flags"]
RATE_COLUMNS = {"R_slb", "R_u", "R_au", "R_ge", "R_trivial", "R_ba"}
ALL_BOUNDS = ("slb", "ru", "rau", "rge", "trivial", "ba")


class ConfigError(Exception):
    pass


def _add_common(parser):
    parser.add_argument("--config", help="key=value file supplying defaults (flags win)")
    parser.add_argument("--source", default="laplacian",
                        help="laplacian | gaussian | csv:PATH (default laplacian)")
    parser.add_argument("--alpha", type=float, default=1.0,
                        help="Laplacian rate parameter (default 1.0)")
    parser.add_argument("--sigma2", type=float, default=1.0,
                        help="Gaussian variance (default 1.0)")
    parser.add_argument("--epsilon", type=float, default=0.0,
                        help="half-width of the forgiven error band (default 0)")
    parser.add_argument("--units", choices=["nats", "bits"], default="nats")
    parser.add_argument("--format", choices=["csv", "json"], default="csv")
    parser.add_argument("--output", default=None, help="output path (default stdout)")
    parser.add_argument("--threads", type=int, default=0,
                        help="worker threads for sweeps (default: machine parallelism)")


def _add_grid(parser):
    parser.add_argument("--grid-min", type=float, default=0.5)
    parser.add_argument("--grid-max", type=float, default=200.0)
    parser.add_argument("--grid-count", type=int, default=20)
    parser.add_argument("--grid-scale", choices=["log", "linear"], default="log")
    parser.add_argument("--grid-var", choices=["s", "d"], default="s",
                        help="sweep variable: slope magnitude or distortion")


def _add_ba(parser):
    parser.add_argument("--ba-n", type=int, default=2001)
    parser.add_argument("--ba-tol", type=float, default=1e-10)
    parser.add_argument("--ba-max-iter", type=int, default=200_000)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rdbounds",
        description="Rate-distortion bounds for the epsilon-insensitive distortion measure",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_bounds = sub.add_parser("bounds", help="sweep bounds over a grid")
    _add_common(p_bounds)
    _add_grid(p_bounds)
    _add_ba(p_bounds)
    p_bounds.add_argument("--bounds", default="slb,ru,rau,rge,trivial",
                          help="comma list from {slb,ru,rau,rge,trivial,ba}")

    p_dmax = sub.add_parser("dmax", help="report zero-rate distortions and the SLB zero")
    _add_common(p_dmax)

    p_ba = sub.add_parser("ba", help="Blahut-Arimoto sweep only")
    _add_common(p_ba)
    _add_grid(p_ba)
    _add_ba(p_ba)

    p_verify = sub.add_parser("verify", help="run cross-module consistency checks")
    _add_common(p_verify)
    _add_ba(p_verify)
    return parser


def _load_config(path) -> list[str]:
    """Turn a key=value file into an argv fragment (later flags override it)."""
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    argv = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}: line {lineno}: expected key=value")
            key, value = line.split("=", 1)
            argv.extend([f"--{key.strip()}", value.strip()])
    return argv


def make_source(args) -> Source:
    kind = args.source
    if kind == "laplacian":
        return Laplacian(alpha=args.alpha)
    if kind == "gaussian":
        return Gaussian(sigma2=args.sigma2)
    if kind.startswith("csv:"):
        try:
            return load_tabulated_csv(kind[4:])
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot load tabulated source: {exc}") from exc
    raise ConfigError(f"unknown source kind: {kind!r}")


def _grid_points(args, loss) -> list[tuple[float, float]]:
    """(s, d) pairs of the sweep, one per grid value."""
    lo, hi = args.grid_min, args.grid_max
    count = args.grid_count
    if count < 1:
        raise ConfigError("grid-count must be >= 1")
    if args.grid_var == "s":
        lo, hi = abs(lo), abs(hi)
    if not (lo > 0 and hi > 0):
        raise ConfigError("grid bounds must be nonzero (slope magnitudes or distortions)")
    if lo > hi:
        lo, hi = hi, lo
    if count == 1:
        values = np.array([lo])
    elif args.grid_scale == "log":
        values = np.geomspace(lo, hi, count)
    else:
        values = np.linspace(lo, hi, count)
    points = []
    for v in values:
        if args.grid_var == "s":
            s = -float(v)
            points.append((s, distortion_of_slope(s, loss)))
        else:
            d = float(v)
            points.append((slope_of_distortion(d, loss), d))
    return points


def _fmt(value) -> str:
    return "" if value is None else f"{value:.12g}"


def _sweep_point(source, loss, selected, s, d, args):
    """Column values and flags for one grid point; failures flag, never abort."""
    values: dict[str, float | None] = {c: None for c in RATE_COLUMNS}
    flags: list[str] = []
    h_p = source.differential_entropy()

    def note_clamp(name, point):
        if point.clamped:
            flags.append(f"{name}_clamped:{point.raw_rate:.6g}")
        if point.flag:
            flags.append(point.flag)

    if "slb" in selected:
        raw = bounds_mod.shannon_lower_bound(d, h_p, loss)
        values["R_slb"] = max(raw, 0.0)
        if raw < 0.0:
            flags.append(f"slb_clamped:{raw:.6g}")
    if "ru" in selected:
        try:
            pt = bounds_mod.convolution_upper_bound(source, s, loss)
            values["R_u"] = pt.r
            note_clamp("ru", pt)
        except (ValueError, ArithmeticError) as exc:
            flags.append(f"ru_error:{exc}")
    if "rau" in selected:
        if not isinstance(source, Laplacian):
            flags.append("rau_unsupported")
        else:
            try:
                pt = bounds_mod.analytic_upper_bound_laplacian(s, source.alpha, loss)
                values["R_au"] = pt.r
                note_clamp("rau", pt)
            except bounds_mod.SingularSlopeError:
                flags.append("rau_singular_slope")
    if "rge" in selected:
        pt = bounds_mod.gaussian_entropy_bound(source, s, loss)
        values["R_ge"] = pt.r
        note_clamp("rge", pt)
    if "trivial" in selected:
        if isinstance(source, Laplacian):
            values["R_trivial"] = bounds_mod.trivial_upper_bound_laplacian(d, source.alpha)
        else:
            flags.append("trivial_unsupported")
    if "ba" in selected:
        try:
            problem = ba_mod.build_problem(source, loss, s, n=args.ba_n)
            result = ba_mod.ba_iterate(problem, tol=args.ba_tol, max_iter=args.ba_max_iter)
            values["R_ba"] = result.rate
            if not result.converged:
                flags.append("ba_not_converged")
        except (ValueError, ArithmeticError) as exc:
            flags.append(f"ba_error:{exc}")
    return {"s": s, "D": d, **values, "flags": ";".join(flags)}


def _convert_units(rows, units):
    if units != "bits":
        return rows
    ln2 = math.log(2.0)
    out = []
    for row in rows:
        row = dict(row)
        for col in RATE_COLUMNS:
            if row.get(col) is not None:
                row[col] = row[col] / ln2
        out.append(row)
    return out


def _emit(rows, args) -> str:
    rows = _convert_units(rows, args.units)
    if args.format == "json":
        payload = {
            "columns": COLUMNS,
            "units": args.units,
            "rows": [
                {c: (row[c] if c in ("flags",) else row.get(c)) for c in COLUMNS}
                for row in rows
            ],
        }
        return json.dumps(payload, indent=2) + "\n"
    lines = [",".join(COLUMNS)]
    for row in rows:
        cells = [_fmt(row["s"]), _fmt(row["D"])]
        cells += [_fmt(row.get(c)) for c in COLUMNS[2:-1]]
        cells.append(row["flags"])
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _write(text, args):
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _n_workers(args) -> int:
    if args.threads and args.threads > 0:
        return args.threads
    return os.cpu_count() or 1


def cmd_bounds(args, selected=None) -> int:
    source = make_source(args)
    loss = EpsilonLoss(args.epsilon)
    if selected is None:
        selected = tuple(b.strip() for b in args.bounds.split(",") if b.strip())
    unknown = set(selected) - set(ALL_BOUNDS)
    if unknown:
        raise ConfigError(f"unknown bounds: {sorted(unknown)}; choose from {ALL_BOUNDS}")
    if not selected:
        raise ConfigError("at least one bound must be selected")
    points = _grid_points(args, loss)
    with ThreadPoolExecutor(max_workers=_n_workers(args)) as pool:
        rows = list(pool.map(lambda sd: _sweep_point(source, loss, selected, *sd, args), points))
    rows.sort(key=lambda row: row["D"])
    _write(_emit(rows, args), args)
    return 0


def cmd_ba(args) -> int:
    return cmd_bounds(args, selected=("ba",))


def cmd_dmax(args) -> int:
    source = make_source(args)
    loss = EpsilonLoss(args.epsilon)
    d_eps = source.d_max(loss)
    d_zero = source.d_max(EpsilonLoss(0.0))
    report = {"epsilon": loss.epsilon, "d_max_eps": d_eps, "d_max_zero": d_zero}
    code = 0
    try:
        root = bounds_mod.slb_zero(source, loss)
        report["slb_zero"] = root
        strict = loss.epsilon > 0.0
        if strict:
            ordered = root < d_eps < d_zero
        else:
            ordered = root <= d_eps + 2e-8 and d_eps <= d_zero + 1e-12
        report["ordered"] = bool(ordered)
        if not ordered:
            code = 1
    except ValueError as exc:
        report["slb_zero"] = None
        report["error"] = str(exc)
        report["ordered"] = False
        code = 1
    if args.format == "json":
        _write(json.dumps(report, indent=2) + "\n", args)
    else:
        lines = []
        if report.get("slb_zero") is not None:
            lines.append(f"slb_zero   = {report['slb_zero']:.12g}")
        else:
            lines.append(f"slb_zero   = unavailable ({report['error']})")
        lines.append(f"d_max_eps  = {d_eps:.12g}")
        lines.append(f"d_max_zero = {d_zero:.12g}")
        lines.append("ordering   = " + ("OK" if report["ordered"] else "VIOLATED"))
        _write("\n".join(lines) + "\n", args)
    return code


def _verify_checks(source, loss, args) -> list[dict]:
    h_p = source.differential_entropy()
    checks = []

    # closed form of the lower bound against its slope-parametric route
    from .tilted import tilted_entropy

    ds = np.geomspace(1e-3, max(source.d_max(loss), 1e-2), 50)
    worst = 0.0
    for d in ds:
        direct = bounds_mod.shannon_lower_bound(d, h_p, loss)
        parametric = h_p - tilted_entropy(slope_of_distortion(d, loss), loss)
        worst = max(worst, abs(direct - parametric))
    checks.append({"name": "slb_two_route", "max_abs_diff": worst, "tol": 1e-12,
                   "passed": worst <= 1e-12})

    # upper-bound dominance at matched slopes
    worst_ge = -math.inf
    worst_au = -math.inf
    for s in -np.geomspace(0.5, 50.0, 12):
        ru = bounds_mod.convolution_upper_bound(source, s, loss)
        rge = bounds_mod.gaussian_entropy_bound(source, s, loss)
        worst_ge = max(worst_ge, ru.raw_rate - rge.raw_rate)
        if isinstance(source, Laplacian):
            try:
                rau = bounds_mod.analytic_upper_bound_laplacian(s, source.alpha, loss)
            except bounds_mod.SingularSlopeError:
                continue
            worst_au = max(worst_au, ru.raw_rate - rau.raw_rate)
    checks.append({"name": "dominance_ru_rge", "max_excess": worst_ge, "tol": 1e-9,
                   "passed": worst_ge <= 1e-9})
    if isinstance(source, Laplacian):
        checks.append({"name": "dominance_ru_rau", "max_excess": worst_au, "tol": 1e-9,
                       "passed": worst_au <= 1e-9})

    # kernel characteristic function against direct cosine-transform quadrature
    from .quadrature import integrate, panel_edges
    from .spectral import tilted_cf
    from .tilted import tilted_pdf

    eps_cf = loss.epsilon if loss.epsilon > 0 else 0.1
    loss_cf = EpsilonLoss(eps_cf)
    worst = 0.0
    for s in (-1.0, -5.0, -20.0):
        upper = eps_cf + 45.0 / abs(s)
        for omega in (0.3, 1.0, 3.7, 10.0):
            period = 2.0 * math.pi / omega
            edges = panel_edges([0.0, eps_cf, upper], min(period / 3.0, 2.0))
            quad = 2.0 * integrate(lambda x: tilted_pdf(x, s, loss_cf) * np.cos(omega * x), edges)
            worst = max(worst, abs(quad - tilted_cf(omega, s, loss_cf)))
    checks.append({"name": "cf_consistency", "max_abs_diff": worst, "tol": 1e-7,
                   "passed": worst <= 1e-7})

    # BA sandwich between the lower bound and the convolution upper bound
    worst_lo = -math.inf
    worst_hi = -math.inf
    for s in (-2.0, -5.0, -20.0):
        problem = ba_mod.build_problem(source, loss, s, n=args.ba_n)
        result = ba_mod.ba_iterate(problem, tol=args.ba_tol, max_iter=args.ba_max_iter)
        d_s = distortion_of_slope(s, loss)
        slb = bounds_mod.shannon_lower_bound(d_s, h_p, loss)
        ru = bounds_mod.convolution_upper_bound(source, s, loss)
        worst_lo = max(worst_lo, slb - result.rate)
        worst_hi = max(worst_hi, result.rate - ru.r)
    checks.append({"name": "ba_sandwich", "max_excess": max(worst_lo, worst_hi), "tol": 2e-2,
                   "passed": worst_lo <= 2e-2 and worst_hi <= 2e-2})

    # grid-convergence of the BA point at a reference slope
    n_half = args.ba_n // 2
    if n_half % 2 == 0:
        n_half += 1
    n_half = max(n_half, 3)
    coarse = ba_mod.ba_iterate(
        ba_mod.build_problem(source, loss, -5.0, n=n_half), tol=args.ba_tol,
        max_iter=args.ba_max_iter)
    fine = ba_mod.ba_iterate(
        ba_mod.build_problem(source, loss, -5.0, n=args.ba_n), tol=args.ba_tol,
        max_iter=args.ba_max_iter)
    drift = max(abs(coarse.distortion - fine.distortion), abs(coarse.rate - fine.rate))
    checks.append({"name": "ba_grid_convergence", "max_change": drift, "tol": 5e-3,
                   "passed": drift <= 5e-3})
    return checks


def cmd_verify(args) -> int:
    source = make_source(args)
    loss = EpsilonLoss(args.epsilon)
    checks = _verify_checks(source, loss, args)
    passed = all(c["passed"] for c in checks)
    payload = {"source": args.source, "epsilon": loss.epsilon, "n": args.ba_n,
               "checks": checks, "passed": passed}
    if args.format == "json":
        _write(json.dumps(payload, indent=2) + "\n", args)
    else:
        lines = []
        for c in checks:
            status = "PASS" if c["passed"] else "FAIL"
            detail = {k: v for k, v in c.items() if k not in ("name", "passed")}
            lines.append(f"{status} {c['name']} {json.dumps(detail)}")
        lines.append("result: " + ("PASS" if passed else "FAIL"))
        _write("\n".join(lines) + "\n", args)
    return 0 if passed else 1


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        # pull config-file defaults in ahead of the explicit flags so that
        # explicitly passed flags win (argparse keeps the last occurrence)
        if "--config" in argv:
            at = argv.index("--config")
            if at + 1 >= len(argv):
                raise ConfigError("--config needs a path")
            injected = _load_config(argv[at + 1])
            head = argv[:1]
            tail = argv[1:]
            argv = head + injected + tail
        args = parser.parse_args(argv)
        handler = {
            "bounds": cmd_bounds,
            "dmax": cmd_dmax,
            "ba": cmd_ba,
            "verify": cmd_verify,
        }[args.command]
        return handler(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
