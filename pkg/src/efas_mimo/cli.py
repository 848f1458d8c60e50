"""Command-line entry point.

Exit codes: 0 success, 1 configuration error, 2 numerical failure,
3 validation-suite failure.
"""
from __future__ import annotations

import argparse
import logging
import sys

from .config import load_config
from .errors import ConfigError, NumericalError
from .runner import (
    render_csv,
    run_fig_capacity,
    run_fig_outage,
    run_fig_sumrate,
    run_fig_zf_dist,
    run_physical_omega,
    run_validate,
    write_output,
)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_VALIDATION = 0, 1, 2, 3


def _global_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", metavar="PATH", help="flat key = value configuration file")
    p.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    p.add_argument("--trials", type=int, help="Monte-Carlo trials per point (all estimators)")
    p.add_argument("--out", metavar="PATH", help="output CSV file (directory for validate)")
    p.add_argument("--workers", type=int, help="worker processes; results do not depend on it")
    p.add_argument("--confidence", type=float, help="confidence level of reported intervals")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override any configuration key; may be repeated")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = argparse.ArgumentParser(prog="efas-mimo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("fig-outage", parents=[common], help="single-user outage vs SNR and Omega_sw")
    sub.add_parser("fig-capacity", parents=[common], help="single-user ergodic capacity")
    sub.add_parser("fig-zf-dist", parents=[common], help="post-ZF SINR histogram, ECDF and gamma law")
    sr = sub.add_parser("fig-sumrate", parents=[common], help="ZF sum rate sweeps")
    sr.add_argument("--vary", choices=("snr", "k", "m"), default="snr")
    sub.add_parser("physical-omega", parents=[common], help="surface physics to Omega_sw pipeline")
    sub.add_parser("validate", parents=[common], help="closed form vs Monte-Carlo validation suite")
    return parser


def _overrides(args) -> dict[str, str]:
    items = {}
    for entry in args.set:
        if "=" not in entry:
            raise ConfigError(f"--set expects KEY=VALUE, got {entry!r}")
        key, value = entry.split("=", 1)
        items[key] = value
    for flag, key in (("seed", "seed"), ("trials", "trials"), ("workers", "workers"),
                      ("confidence", "confidence"), ("out", "output_path")):
        value = getattr(args, flag, None)
        if value is not None:
            items[key] = str(value)
    return items


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config, _overrides(args))
        if args.command == "validate":
            report = run_validate(cfg)
            report.write(cfg.output_path)
            return EXIT_OK if report.passed else EXIT_VALIDATION
        runners = {
            "fig-outage": run_fig_outage,
            "fig-capacity": run_fig_capacity,
            "fig-zf-dist": run_fig_zf_dist,
            "physical-omega": run_physical_omega,
        }
        if args.command == "fig-sumrate":
            table = run_fig_sumrate(cfg, args.vary)
        else:
            table = runners[args.command](cfg)
        write_output(render_csv(table, cfg), cfg.output_path)
        return EXIT_OK
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
