"""Command line entry point.

    python -m ordinal_bucketing quantile-sweep --config plan.json [--out results.csv]
    python -m ordinal_bucketing gameplay --config plan.json --jobs 4

Exit status: 0 on success, 1 for configuration errors, 2 when at least one
run failed (failed runs still get a row with the error message).
"""
from __future__ import annotations

import argparse
import logging
import sys

from .config import ConfigError, load_plan
from .runner import run_plan

FAMILY_FOR = {"quantile-sweep": "QuantileError", "gameplay": "GamePlay"}

log = logging.getLogger("ordinal_bucketing.harness")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ordinal-bucketing", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("quantile-sweep", "quantile-error sweep over bucketing parameters"),
                        ("gameplay", "play games with the search variants")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, help="JSON experiment plan")
        p.add_argument("--out", help="CSV output path (overrides the plan's 'output')")
        p.add_argument("--seed", type=int, help="base seed (overrides the plan's 'base_seed')")
        p.add_argument("--jobs", type=int, default=1, help="worker processes")
        p.add_argument("--validate-only", action="store_true", help="check the config and exit")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        plan = load_plan(args.config, seed=args.seed, output=args.out)
        if plan.family != FAMILY_FOR[args.command]:
            raise ConfigError(f"family: {args.command} expects {FAMILY_FOR[args.command]!r}, got {plan.family!r}")
        if args.jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        if not plan.output and not args.validate_only:
            raise ConfigError("output: no output path (set 'output' or pass --out)")
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return 1
    n_runs = len(plan.points()) * plan.repetitions
    if args.validate_only:
        log.info("config ok: %d grid points x %d repetitions = %d runs",
                 len(plan.points()), plan.repetitions, n_runs)
        return 0
    summary = run_plan(plan, jobs=args.jobs)
    log.info("wrote %d rows to %s (aggregates: %s)", len(summary.rows), summary.output, summary.aggregate_output)
    if summary.failures:
        log.error("%d of %d runs failed", summary.failures, n_runs)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
