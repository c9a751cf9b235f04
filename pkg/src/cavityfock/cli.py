"""Command-line entry point: ``cavityfock {simulate,reconstruct,cavity-design,rates}``.

Exit codes: 0 success, 2 configuration or input error, 3 numeric error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import io
from .cavity import default_loop_sweep, nearest_row, rate_curves
from .config import parse_config
from .exceptions import ConfigError, DomainError
from .pipeline import WIGNER_GRID, rates_report, reconstruct, simulate
from .tomo import TomoConfig

log = logging.getLogger("cavityfock")

EXIT_CONFIG = 2
EXIT_NUMERIC = 3

MARKERS = {"measured": (0.93, 0.90), "impedance_matched": (0.99, 0.99)}


def _load(args):
    if not args.config:
        raise ConfigError("--config is required for this command")
    return parse_config(io.read_json(args.config), seed=args.seed)


def cmd_simulate(args) -> int:
    cfg = _load(args)
    res = simulate(cfg)
    out = Path(args.out)
    io.write_density(out / "state.json", res.state)
    io.write_dataset(out / "dataset.csv", res.dataset)
    report = dict(res.rates)
    report["herald_prob_per_pulse"] = res.herald.prob_per_pulse
    report["herald_rate_hz"] = res.herald.rate_hz
    io.write_json(out / "rates.json", report)
    log.info("heralded state diag: %s", np.array2string(res.state.diag(), precision=4))
    log.info("herald rate %.4g Hz; %d samples written to %s", res.herald.rate_hz, len(res.dataset), out)
    return 0


def cmd_reconstruct(args) -> int:
    data = io.read_dataset(args.dataset)
    base = _load(args).tomo if args.config else TomoConfig()
    overrides = {k: v for k, v in {"eta_d": args.eta_d, "dim": args.dim, "mode": args.mode,
                                   "tol": args.tol, "max_iter": args.max_iter,
                                   "bins": args.bins}.items() if v is not None}
    try:
        cfg = TomoConfig(**{**base.__dict__, **overrides})
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    res = reconstruct(data, cfg, WIGNER_GRID)
    out = Path(args.out)
    io.write_density(out / "rho.json", res.rho)
    io.write_json(out / "diagnostics.json", res.diagnostics.to_dict())
    io.write_wigner_csv(out / "wigner.csv", res.xvec, res.xvec, res.wigner)
    io.write_json(out / "negativity.json", res.negativity)
    log.info("reconstructed diag: %s", np.array2string(res.rho.diag(), precision=4))
    log.info("W(0,0) = %.4g, ring minimum %.4g at r = %.3f", res.negativity["wigner_origin"],
             res.negativity["radial_min"], res.negativity["ring_radius"])
    return 0


def _loop_sweep(spec):
    if spec is None:
        return default_loop_sweep()
    start, stop = spec[0], spec[1]
    step = spec[2] if len(spec) > 2 else 1e-3
    if step <= 0:
        raise ConfigError("--rm step must be positive")
    if stop < start:
        return np.array([])
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(count), 12)


def cmd_cavity_design(args) -> int:
    r_loops = _loop_sweep(args.rm)
    r_ins = args.ri if args.ri is not None else [0.90, 0.99]
    if len(r_loops) == 0 or len(r_ins) == 0:
        raise ConfigError("empty reflectivity sweep")
    try:
        rows = rate_curves(r_ins, r_loops, (args.baseline_r1, args.baseline_r2))
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    out = Path(args.out)
    io.write_rate_table(out / "cavity_design.csv", rows)
    markers = {}
    for name, (rm, ri) in MARKERS.items():
        i = nearest_row(rows, rm, ri)
        markers[name] = {"row": i, **rows[i]._asdict()}
    io.write_json(out / "cavity_design_markers.json", markers)
    for name, m in markers.items():
        log.info("%s: R_m=%.3f R_i=%.3f E=%.4g rate2 gain %.4g", name, m["r_m"], m["r_i"],
                 m["enhancement"], m["rate2_gain"])
    return 0


def cmd_rates(args) -> int:
    report = rates_report(_load(args))
    io.write_json(Path(args.out) / "rates.json", report)
    log.info("R1 = %.4g Hz, R2 = %.4g Hz, R1^2/(2R) = %.4g Hz", report["rate1_hz"],
             report["rate2_hz"], report["formula_rate2_hz"])
    if "reference" in report and "note" in report["reference"]:
        log.info("%s", report["reference"]["note"])
    return 0


def _add_globals(p, suppress):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--config", metavar="PATH", default=d(None), help="JSON simulation config")
    p.add_argument("--out", metavar="DIR", default=d("."), help="output directory")
    p.add_argument("--seed", type=int, default=d(None), help="override sampling.seed")
    p.add_argument("--quiet", action="store_true", default=d(False))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cavityfock", description=__doc__.splitlines()[0])
    _add_globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="herald, lose and sample a state")
    _add_globals(p, suppress=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reconstruct", help="maximum-likelihood tomography of a dataset CSV")
    _add_globals(p, suppress=True)
    p.add_argument("dataset", help="CSV with header theta,x")
    p.add_argument("--eta-d", type=float, help="detection efficiency to correct for")
    p.add_argument("--dim", type=int)
    p.add_argument("--mode", choices=["full", "diagonal"])
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iter", type=int)
    p.add_argument("--bins", type=int, help="histogram bins (default: unbinned)")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("cavity-design", help="enhancement and rate table over reflectivities")
    _add_globals(p, suppress=True)
    p.add_argument("--ri", type=float, nargs="+", help="input-coupler reflectivities")
    p.add_argument("--rm", type=float, nargs="+", metavar="R", help="loop sweep: START STOP [STEP]")
    p.add_argument("--baseline-r1", type=float, default=1.0, help="single-pass single-photon rate (Hz)")
    p.add_argument("--baseline-r2", type=float, default=1.0, help="single-pass two-photon rate (Hz)")
    p.set_defaults(func=cmd_cavity_design)

    p = sub.add_parser("rates", help="predicted herald rates")
    _add_globals(p, suppress=True)
    p.set_defaults(func=cmd_rates)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(message)s", stream=sys.stderr, force=True)
    if getattr(args, "rm", None) is not None and len(args.rm) not in (2, 3):
        parser.error("--rm takes START STOP [STEP]")
    try:
        return args.func(args)
    except (ConfigError, DomainError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ArithmeticError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
