"""Command line entry point: ``foldcaustic run|check|field``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .checks import run_checks
from .experiment import WaveConfig, run_experiment, write_complex_csv
from .fields import Route, make_eta_grid, spectral_profile, synthesize_field, u_gb_physical

log = logging.getLogger("foldcaustic")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="flat JSON file with WaveConfig fields")
    common.add_argument("--threads", type=int, help="worker threads for the k-sweep")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="foldcaustic", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", parents=[common], help="k-sweep at the caustic plus all checks")
    run.add_argument("--no-plots", action="store_true")
    sub.add_parser("check", parents=[common], help="property checks only")
    field = sub.add_parser("field", parents=[common], help="write one field slice u(x, y) as CSV")
    field.add_argument("--k", type=float, required=True)
    field.add_argument("--x", type=float, required=True)
    field.add_argument("--route", choices=[r.value for r in Route], default=Route.exact.value)
    return parser


def load_config(args) -> WaveConfig:
    data = {}
    if args.config is not None:
        import json

        data = json.loads(args.config.read_text())
    if args.threads is not None:
        data["threads"] = args.threads
    if args.out is not None:
        data["out_dir"] = str(args.out)
    return WaveConfig.from_dict(data)


def cmd_run(cfg, args):
    report = run_experiment(cfg, write=False)
    from .experiment import write_report

    out = write_report(report, cfg, plots=not args.no_plots)
    for r in report.records:
        log.info("k=%-8g error=%.4e max|u|=%.4f (%.1fs)", r.k, r.linf_error, r.max_u_exact, r.runtime)
    print(f"fitted rate {report.fitted_rate:.4f}, relative rate {report.fitted_relative_rate:.4f}")
    _print_checks(report.property_checks)
    for msg in report.hard_failures:
        print(f"FAIL {msg}")
    print(f"report written to {out}")
    return 0 if report.passed else 1


def _print_checks(checks):
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.detail}")


def cmd_check(cfg, args):
    checks = run_checks(cfg.incidence, seed=cfg.seed)
    _print_checks(checks)
    return 0 if all(c.passed for c in checks) else 1


def cmd_field(cfg, args):
    inc, env = cfg.incidence, cfg.envelope
    route = Route(args.route)
    y = cfg.y_grid()
    if route is Route.gb_physical:
        u = u_gb_physical(inc, args.x, y, args.k, cfg.quad_tol, env)
    else:
        eta = make_eta_grid(args.k, env, np.ptp(y), cfg.eta_floor)
        prof = spectral_profile(inc, args.x, args.k, eta, route, env, cfg.quad_tol, tail_tol=cfg.tail_tol)
        u = synthesize_field(prof, y, cfg.eta_floor).u
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"field_{route.value}_k{args.k:g}_x{args.x:g}"
    write_complex_csv(out / f"{stem}.csv", {"y": y, "u": u})
    from .plotting import field_plot

    field_plot(y, u, args.k, args.x, out / f"{stem}.png")
    print(out / f"{stem}.csv")
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = load_config(args)
    except (ValueError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return {"run": cmd_run, "check": cmd_check, "field": cmd_field}[args.command](cfg, args)


if __name__ == "__main__":
    sys.exit(main())
