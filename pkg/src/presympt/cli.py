"""Command-line driver: ``presympt <experiment> --config c.json --out out.csv``.

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import sys

from .core import NonFiniteError
from .harness import ConfigError, load_config, run_experiment, write_csv
from .integrators import FixedPointError

SUBCOMMANDS = {
    "simulate": "simulate",
    "order": "order",
    "phase-sweep": "phase_sweep",
    "rate-report": "rate_report",
    "quad-bench": "quad_bench",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # usage mistakes are configuration errors, not numerical ones
        self.print_usage(sys.stderr)
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="presympt", description=__doc__)
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in SUBCOMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", required=True, help="JSON experiment configuration")
        cmd.add_argument("--out", required=True, help="output CSV path")
        cmd.add_argument("--threads", type=int, default=1, help="worker processes for sweeps")
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = load_config(args.config, expected_kind=SUBCOMMANDS[args.experiment])
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        header, rows = run_experiment(cfg, threads=args.threads)
    except (NonFiniteError, FixedPointError, ArithmeticError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    try:
        write_csv(args.out, header, rows)
    except OSError as exc:
        print(f"config error: cannot write {args.out}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
