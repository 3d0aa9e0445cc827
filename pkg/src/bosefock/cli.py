"""Command-line front end: ``bosefock <command> [--config PATH] [options]``."""

import argparse
import dataclasses
import sys

from .errors import ConfigError, ParseError, PositivityError, QuadratureError
from .jobs import COMMANDS, JobConfig, format_report, run_job

_HELP = {
    "partition": "truncated and closed-form partition function with the tail bound",
    "gibbs": "thermal expectation of an operator expression, direct and closed form",
    "weyl": "Weyl operator against displacement and quadrature Toeplitz matrices",
    "trace-mc": "Monte Carlo coherent-state trace with standard error and bias bound",
    "sobolev": "Fock-Sobolev norms of a state, chain and level forms",
    "hermite": "Hermite orthonormality, values and derivative identity",
    "verify": "run the property suites; exits nonzero on any failure",
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="bosefock",
        description="Truncated Bose-Fock space numerics driven by JSON job files.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name in COMMANDS:
        p = sub.add_parser(name, help=_HELP[name], description=_HELP[name])
        p.add_argument("--config", metavar="PATH", help="JSON job file (defaults apply when omitted)")
        p.add_argument("--seed", type=int, metavar="U64", help="RNG seed, overrides the config")
        p.add_argument("--samples", type=int, metavar="N", help="Monte Carlo samples, overrides the config")
        p.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), default="json", help="report format")
    return parser


def load_config(args):
    cfg = JobConfig.load(args.config) if args.config else JobConfig()
    overrides = {}
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            raise ConfigError(f"--seed must be an unsigned 64-bit integer, got {args.seed}")
        overrides["seed"] = args.seed
    if args.samples is not None:
        if args.samples < 2:
            raise ConfigError(f"--samples must be at least 2, got {args.samples}")
        overrides["samples"] = args.samples
    return dataclasses.replace(cfg, **overrides) if overrides else cfg


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        report = run_job(cfg, args.command)
    except (ConfigError, ParseError, PositivityError, QuadratureError, ValueError, OSError) as exc:
        print(f"bosefock {args.command}: error: {exc}", file=sys.stderr)
        return 2
    text = format_report(report, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.command == "verify" and report["value"]:
        print(f"verify: failing suites: {', '.join(report['details']['failed_suites'])}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
