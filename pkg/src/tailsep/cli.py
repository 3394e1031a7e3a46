"""Command-line interface: detect, crit-table, simulate, risk.

Input is CSV, output is JSON (reports) and CSV (curves).  Exit codes:
0 success (possibly with warnings), 2 usage/data error, 3 internal numerical
failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from importlib.resources import files

import numpy as np

from . import __version__
from .critical_values import (
    P_GRID,
    STAT_NAMES,
    XI_GRID,
    McConfig,
    builtin_table,
    generate_table,
    save_table,
)
from .distributions import ParentDistribution
from .errors import BelowTailError
from .risk import risk_report, to_losses
from .tail_detect import ScanOptions, TailModel, detect, ideal_case_sample, mc_experiment, scan
from .distributions import GpdParams

PARENT_PRESETS = {
    "lognormal": ParentDistribution("lognormal", 0.0, 1.0),
    "normal": ParentDistribution("normal", 0.0, 1.0),
    "gev": ParentDistribution("gev", 0.0, 1.0, 0.5),
    "gpd": ParentDistribution("gpd", 0.0, 1.0, 0.5),
    "exponential": ParentDistribution("exponential", 0.0, 1.0),
}


class DataError(Exception):
    """User-facing input problem; maps to exit code 2."""


def ideal_fixture_path(parent: str):
    """Path of the bundled ideal-case sample (n=1000) for a Table-2 parent."""
    return files("tailsep").joinpath("data", f"ideal_{parent}_n1000.csv")


# ---------------------------------------------------------------------------
# CSV ingestion


def read_csv_column(path: str, column: str) -> np.ndarray:
    """Read one numeric column; header auto-detected, blanks skipped.

    ``column`` is a 1-based index or a header name.  Non-numeric cells are
    hard errors.
    """
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    with fh:
        rows = [r for r in csv.reader(fh) if any(cell.strip() for cell in r)]
    if not rows:
        raise DataError(f"{path} contains no data")

    header = None
    first = rows[0]
    try:
        [float(c) for c in first]
    except ValueError:
        header = [c.strip() for c in first]
        rows = rows[1:]
    if not rows:
        raise DataError(f"{path} contains a header but no data rows")

    if column.isdigit():
        idx = int(column) - 1
        if idx < 0:
            raise DataError(f"column index must be >= 1, got {column}")
    else:
        if header is None or column not in header:
            raise DataError(f"column {column!r} not found in {path}")
        idx = header.index(column)

    out = np.empty(len(rows))
    for r, row in enumerate(rows):
        if idx >= len(row):
            raise DataError(f"{path}: row {r + 1} has no column {column}")
        cell = row[idx].strip()
        try:
            out[r] = float(cell)
        except ValueError:
            raise DataError(f"{path}: non-numeric value {cell!r} in row {r + 1}") from None
    return out


# ---------------------------------------------------------------------------
# Report serialization


def _pvalue_dict(pv) -> dict:
    return {"value": pv.value, "censored": pv.censored}


def model_dict(model: TailModel) -> dict:
    return {
        "u": model.u,
        "k_star": model.k_star,
        "n": model.n,
        "tail_fraction": model.tail_fraction,
        "xi": model.params.xi,
        "sigma": model.params.sigma,
        "gof": {
            s: {"value": g["value"], "p_value": _pvalue_dict(g["p_value"])}
            for s, g in model.gof.items()
        },
        "warnings": list(model.warnings),
    }


def dumps_report(report: dict) -> str:
    """Canonical JSON encoding; identical bytes on a dump/load/dump round trip."""
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def write_scan_csv(path: str, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "au2", "w2", "a2", "xi", "sigma", "fit_converged"])
        for r in rows:
            w.writerow([r.k, repr(r.au2), repr(r.w2), repr(r.a2),
                        repr(r.xi_k), repr(r.sigma_k), int(r.fit_converged)])


# ---------------------------------------------------------------------------
# Subcommands


def cmd_detect(args) -> int:
    series = read_csv_column(args.input, args.column)
    losses = to_losses(series, args.transform)
    if losses.size < 3:
        raise DataError(f"insufficient data: need at least 3 values, got {losses.size}")
    options = ScanOptions(
        p_value_mode=args.p_value_mode, mc_reps=args.mc_reps, mc_seed=args.seed
    )
    table = builtin_table()
    rows = scan(losses, options)
    model = detect(losses, table, options)

    report = {
        "tool": {"name": "tailsep", "version": __version__},
        "input": {
            "path": args.input,
            "column": args.column,
            "transform": args.transform,
            "n": int(losses.size),
        },
        "seed": args.seed,
        "model": model_dict(model),
        "warnings": list(model.warnings),
    }
    if args.levels:
        levels = _parse_levels(args.levels)
        rr = risk_report(model, levels, s0=args.s0)
        report["risk"] = {
            "levels": list(rr.levels),
            "var": {repr(l): v for l, v in rr.var.items()},
            "cvar": {repr(l): v for l, v in rr.cvar.items()},
            "delta_s": {repr(l): v for l, v in rr.delta_s.items()},
            "flagged_levels": list(rr.flagged_levels),
        }
    out = dumps_report(report)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    if args.scan_csv:
        write_scan_csv(args.scan_csv, rows)
    for w in model.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return 0


def _parse_levels(text: str):
    try:
        levels = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise DataError(f"bad levels list {text!r}") from None
    if not levels or any(not 0 < l < 1 for l in levels):
        raise DataError("levels must lie strictly between 0 and 1")
    return levels


def _parse_grid(text: str | None, default):
    if text is None:
        return default
    try:
        return tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise DataError(f"bad grid {text!r}") from None


def cmd_crit_table(args) -> int:
    try:
        config = McConfig(replications=args.reps, sample_size=args.n, seed=args.seed)
    except ValueError as exc:
        raise DataError(str(exc)) from exc
    xi_grid = _parse_grid(args.xi_grid, XI_GRID)
    p_grid = _parse_grid(args.p_grid, P_GRID)
    table = generate_table(config, xi_grid, p_grid)
    json_path = args.output + ".json" if not args.output.endswith(".csv") \
        else args.output[:-4] + ".json"
    save_table(table, args.output, json_path)
    print(f"wrote {args.output} and {json_path}")
    if args.verify:
        ref = builtin_table()
        if tuple(xi_grid) != ref.xi_grid or tuple(p_grid) != ref.p_grid:
            raise DataError("--verify requires the default xi/p grids")
        for s in STAT_NAMES:
            dev = np.abs(table.values[s] / ref.values[s] - 1.0)
            print(f"{s}: max relative deviation {dev.max():.4f} "
                  f"(p >= 0.01: {dev[:, :-2].max():.4f})")
    return 0


def cmd_simulate(args) -> int:
    if args.parent not in PARENT_PRESETS:
        raise DataError(f"unknown parent {args.parent!r}; one of {sorted(PARENT_PRESETS)}")
    parent = PARENT_PRESETS[args.parent]
    os.makedirs(args.output_dir, exist_ok=True)
    for n in args.n:
        if args.mode == "ideal":
            x = ideal_case_sample(parent, n)
            rows = scan(x)
            au = np.array([r.au2 for r in rows])
            idx = int(np.argmin(au))
            k_star = idx + 2
            path = os.path.join(args.output_dir, f"ideal_{args.parent}_n{n}_scan.csv")
            write_scan_csv(path, rows)
            summary = {
                "parent": args.parent,
                "n": n,
                "k_star": k_star,
                "tail_fraction": k_star / n,
                "xi_star": rows[idx].xi_k,
                "final_au2": rows[-1].au2,
                "top_point": "upper-endpoint" if np.isfinite(parent.upper_endpoint)
                             else "(n-0.5)/n plotting position",
            }
            spath = os.path.join(args.output_dir, f"ideal_{args.parent}_n{n}_summary.json")
            with open(spath, "w") as fh:
                fh.write(dumps_report(summary))
            print(f"wrote {path} and {spath}")
        else:
            res = mc_experiment(parent, n, args.reps, seed=args.seed)
            path = os.path.join(args.output_dir, f"mc_{args.parent}_n{n}_curve.csv")
            with open(path, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["k", "mean_au2", "band_lo", "band_hi"])
                for j, k in enumerate(res.k):
                    w.writerow([int(k), repr(res.mean_au2[j]),
                                repr(res.band_lo[j]), repr(res.band_hi[j])])
            hpath = os.path.join(args.output_dir, f"mc_{args.parent}_n{n}_kstar.csv")
            with open(hpath, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["k_star", "xi_star", "tail_fraction"])
                for j in range(res.k_star.size):
                    w.writerow([int(res.k_star[j]), repr(res.xi_star[j]),
                                repr(res.tail_fraction[j])])
            print(f"wrote {path} and {hpath}")
    return 0


def cmd_risk(args) -> int:
    if args.report:
        with open(args.report) as fh:
            rep = json.load(fh)
        m = rep["model"]
        u, xi, sigma = m["u"], m["xi"], m["sigma"]
        k_star, n = m["k_star"], m["n"]
    else:
        missing = [f for f in ("u", "xi", "sigma", "k_star", "n_total")
                   if getattr(args, f) is None]
        if missing:
            raise DataError(f"either --report or all of --u --xi --sigma --k-star "
                            f"--n-total are required (missing: {', '.join(missing)})")
        u, xi, sigma = args.u, args.xi, args.sigma
        k_star, n = args.k_star, args.n_total
    model = TailModel(u=u, k_star=k_star, n=n, params=GpdParams(xi, sigma), gof={})
    levels = _parse_levels(args.levels)
    rr = risk_report(model, levels, s0=args.s0,
                     mean_excess_from_threshold=args.mean_excess_from_threshold)
    report = {
        "tool": {"name": "tailsep", "version": __version__},
        "model": {"u": u, "xi": xi, "sigma": sigma, "k_star": k_star, "n": n,
                  "tail_fraction": k_star / n},
        "levels": list(rr.levels),
        "var": {repr(l): v for l, v in rr.var.items()},
        "cvar": {repr(l): v for l, v in rr.cvar.items()},
        "delta_s": {repr(l): v for l, v in rr.delta_s.items()},
        "flagged_levels": list(rr.flagged_levels),
    }
    out = dumps_report(report)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    for l in rr.flagged_levels:
        print(f"warning: level {l} lies below the tail model's reach; "
              "use the empirical quantile for it", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tailsep",
                                description="Separate body and tail of a distribution, "
                                            "fit a GPD tail model and compute VaR/CVaR.")
    p.add_argument("--version", action="version", version=f"tailsep {__version__}")
    p.add_argument("--threads", type=int,
                   default=int(os.environ.get("TAILSEP_THREADS", "1")),
                   help="cap on worker threads (results are identical at any value)")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("detect", help="detect the tail threshold in a CSV series")
    d.add_argument("--input", required=True)
    d.add_argument("--column", default="1", help="1-based index or header name")
    d.add_argument("--transform", default="identity",
                   choices=["identity", "negate", "neg-log-returns"])
    d.add_argument("--levels", default=None,
                   help="comma-separated confidence levels for VaR/CVaR")
    d.add_argument("--s0", type=float, default=None, help="price for monetary loss")
    d.add_argument("--p-value-mode", default="table", choices=["table", "mc"])
    d.add_argument("--mc-reps", type=int, default=10_000)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--output", default=None, help="JSON report path (default stdout)")
    d.add_argument("--scan-csv", default=None, help="per-k scan curve CSV path")
    d.set_defaults(func=cmd_detect)

    c = sub.add_parser("crit-table", help="generate a critical-value table by Monte Carlo")
    c.add_argument("--reps", type=int, default=200_000)
    c.add_argument("--n", type=int, default=1000)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--xi-grid", default=None)
    c.add_argument("--p-grid", default=None)
    c.add_argument("--output", default="crit_table.csv")
    c.add_argument("--verify", action="store_true",
                   help="diff the generated table against the embedded one")
    c.set_defaults(func=cmd_crit_table)

    s = sub.add_parser("simulate", help="ideal-case and Monte Carlo experiments")
    s.add_argument("--mode", required=True, choices=["ideal", "mc"])
    s.add_argument("--parent", required=True)
    s.add_argument("--n", type=int, nargs="+", required=True)
    s.add_argument("--reps", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--output-dir", default=".")
    s.set_defaults(func=cmd_simulate)

    r = sub.add_parser("risk", help="VaR/CVaR from a detect report or explicit parameters")
    r.add_argument("--report", default=None, help="DetectReport JSON from `detect`")
    r.add_argument("--u", type=float, default=None)
    r.add_argument("--xi", type=float, default=None)
    r.add_argument("--sigma", type=float, default=None)
    r.add_argument("--k-star", type=int, default=None)
    r.add_argument("--n-total", type=int, default=None)
    r.add_argument("--levels", required=True)
    r.add_argument("--s0", type=float, default=None)
    r.add_argument("--mean-excess-from-threshold", action="store_true",
                   help="alternative CVaR convention measuring the excess from u")
    r.add_argument("--output", default=None)
    r.set_defaults(func=cmd_risk)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (FloatingPointError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
