"""
Command-line front end.

    hybridloc locate   CONFIG --r R --az AZ --el EL
    hybridloc crlb     CONFIG
    hybridloc simulate CONFIG [--runs N] [--seed S] [--estimators wls,ml]
    hybridloc sweep    CONFIG --mode noise|target [--values v1,v2,...]
    hybridloc cdf      CONFIG [--runs N]

Angles on the command line and in config files are degrees unless --radians
is given. Exit codes: 0 success, 2 configuration error, 3 numerical/geometry
error.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import logging
import math
import sys
from typing import Any, Sequence

import numpy as np

from . import __version__
from .config import ScenarioConfig, load_config
from .errors import ConfigError, LocalizationError
from .estimator import locate
from .geometry import MeasurementVector, wrap_angle
from .montecarlo import (
    DEFAULT_RHO_VALUES,
    DEFAULT_X_VALUES,
    ESTIMATORS,
    error_cdf,
    merged_cdf_table,
    noise_sweep,
    run_ensemble,
    target_sweep,
)
from .reference import crlb

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

log = logging.getLogger("hybridloc")


def format_float(x: float | None) -> str:
    """Shortest round-trip decimal; empty for missing or NaN."""
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return repr(float(x))


def write_csv(stream, header: Sequence[str], rows) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, (int, str)) else format_float(v) for v in row])


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _finite_or_none(x: float) -> float | None:
    return None if x is None or not math.isfinite(x) else float(x)


def result_record(command: str, cfg: ScenarioConfig, outputs: dict, timestamp: bool) -> dict[str, Any]:
    rec = {"command": command, "config": cfg.to_dict(), "outputs": outputs, "version": __version__}
    if timestamp:
        rec["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
    return rec


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, default=_json_default, allow_nan=False) + "\n"


def _parse_csv_list(text: str, cast, what: str) -> list:
    try:
        return [cast(v.strip()) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"invalid {what} list {text!r}: {exc}") from exc


def _estimators(text: str) -> tuple[str, ...]:
    est = tuple(_parse_csv_list(text, str, "estimator"))
    bad = [e for e in est if e not in ESTIMATORS]
    if bad or not est:
        raise ConfigError(f"--estimators must be a comma list of {ESTIMATORS}, got {text!r}")
    if "wls" not in est:
        raise ConfigError("--estimators must include wls")
    return est


def _open_out(path: str | None):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def _emit(text: str, path: str | None) -> None:
    stream, close = _open_out(path)
    try:
        stream.write(text)
    finally:
        if close:
            stream.close()


def _crlb_bound(scenario) -> float | None:
    try:
        return crlb(scenario.target, scenario.sensors, scenario.noise).rmse_bound
    except LocalizationError as exc:
        log.warning("CRLB unavailable: %s", exc)
        return None


# -- commands ---------------------------------------------------------------


def cmd_locate(args) -> int:
    cfg = load_config(args.config, radians=args.radians)
    to_rad = (lambda v: v) if args.radians else math.radians
    m = MeasurementVector(args.r, wrap_angle(to_rad(args.az)), to_rad(args.el))
    scenario = cfg.to_scenario()
    est = locate(m, scenario.sensors, scenario.noise, scenario.estimator_opts)
    outputs = {
        "measurement": {"r_m": args.r, "az": args.az, "el": args.el, "angle_unit": "rad" if args.radians else "deg"},
        "u_hat_m": est.u_hat,
        "covariance_m2": est.covariance,
        "iterations_used": est.iterations_used,
        "condition_number": est.condition_number,
    }
    _emit(dumps(result_record("locate", cfg, outputs, timestamp=False)), args.output)
    return EXIT_OK


def cmd_crlb(args) -> int:
    cfg = load_config(args.config, radians=args.radians)
    sc = cfg.to_scenario()
    res = crlb(sc.target, sc.sensors, sc.noise)
    outputs = {"fim": res.fim, "crlb_m2": res.crlb, "rmse_bound_m": res.rmse_bound}
    _emit(dumps(result_record("crlb", cfg, outputs, timestamp=False)), args.output)
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = load_config(args.config, radians=args.radians)
    est = _estimators(args.estimators)
    sc = cfg.to_scenario(runs=args.runs, seed=args.seed)
    stats = run_ensemble(sc, est)

    buf = io.StringIO()
    header = ["run_index"] + [f"error_{name}_m" for name in est]
    rows = ([i + 1] + [stats[name].errors[i] for name in est] for i in range(sc.runs))
    write_csv(buf, header, rows)
    _emit(buf.getvalue(), args.output)

    outputs = {
        name: {
            "rmse_m": _finite_or_none(s.rmse),
            "bias_m": [_finite_or_none(b) for b in s.bias],
            "failure_count": s.failure_count,
        }
        for name, s in stats.items()
    }
    outputs["crlb_rmse_bound_m"] = _crlb_bound(sc)
    outputs["runs"] = sc.runs
    outputs["seed"] = sc.master_seed
    summary = dumps(result_record("simulate", cfg, outputs, timestamp=True))
    if args.summary:
        _emit(summary, args.summary)
    else:
        sys.stderr.write(summary)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = load_config(args.config, radians=args.radians)
    est = _estimators(args.estimators)
    sc = cfg.to_scenario(runs=args.runs, seed=args.seed)
    if args.values is not None:
        values = _parse_csv_list(args.values, float, "--values")
    else:
        values = list(DEFAULT_RHO_VALUES if args.mode == "noise" else DEFAULT_X_VALUES)
    if args.mode == "noise":
        res = noise_sweep(sc, values, est, cfg.sweep_sigma_r_m_per_rho, cfg.sweep_sigma_angle_rad_per_rho)
    else:
        res = target_sweep(sc, values, est)

    for v, fails in zip(res.axis_values, res.failures):
        if fails:
            sys.stderr.write(f"warning: {fails} failed runs at {args.mode} value {v!r}\n")
    header = ["axis_value", "rmse_wls_m", "crlb_bound_m"]
    cols = [res.axis_values, res.rmse_wls, res.crlb_bound]
    if res.rmse_ml is not None:
        header.append("rmse_ml_m")
        cols.append(res.rmse_ml)
    buf = io.StringIO()
    write_csv(buf, header, zip(*cols))
    _emit(buf.getvalue(), args.output)
    return EXIT_OK


def cmd_cdf(args) -> int:
    cfg = load_config(args.config, radians=args.radians)
    sc = cfg.to_scenario(runs=args.runs, seed=args.seed)
    cdfs = error_cdf(sc)
    buf = io.StringIO()
    write_csv(buf, ["error_m", "cdf_wls", "cdf_ml"], merged_cdf_table(cdfs, sc.runs))
    _emit(buf.getvalue(), args.output)
    return EXIT_OK


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hybridloc", description=__doc__.split("\n\n")[0].strip())
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("config", help="scenario JSON file")
        sp.add_argument("--radians", action="store_true", help="angles in config and flags are radians")
        sp.add_argument("-o", "--output", help="output file (default: stdout)")

    def ensemble(sp, estimators=True):
        sp.add_argument("--runs", type=int, help="override config runs")
        sp.add_argument("--seed", type=int, help="override config seed")
        if estimators:
            sp.add_argument("--estimators", default="wls", help="comma list from wls,ml (default: wls)")

    sp = sub.add_parser("locate", help="single-shot closed-form position estimate")
    common(sp)
    sp.add_argument("--r", type=float, required=True, help="range difference, meters")
    sp.add_argument("--az", type=float, required=True, help="azimuth")
    sp.add_argument("--el", type=float, required=True, help="elevation")
    sp.set_defaults(func=cmd_locate)

    sp = sub.add_parser("crlb", help="Fisher information and CRLB at the config target")
    common(sp)
    sp.set_defaults(func=cmd_crlb)

    sp = sub.add_parser("simulate", help="Monte Carlo ensemble, per-run errors as CSV")
    common(sp)
    ensemble(sp)
    sp.add_argument("--summary", help="write summary JSON here instead of stderr")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("sweep", help="RMSE and CRLB over noise scale or target x")
    common(sp)
    ensemble(sp)
    sp.add_argument("--mode", choices=("noise", "target"), required=True)
    sp.add_argument("--values", help="comma list of rho values or target x coordinates (m)")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("cdf", help="paired WLS/ML empirical error CDFs")
    common(sp)
    ensemble(sp, estimators=False)
    sp.set_defaults(func=cmd_cdf)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s", stream=sys.stderr)
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        sys.stderr.write(f"error: ConfigError: {exc}\n")
        return EXIT_CONFIG
    except LocalizationError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_NUMERIC
