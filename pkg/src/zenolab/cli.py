"""Command-line runner for scenario files.

Exit codes: 0 success, 2 scenario validation failure, 3 numerical failure
(ill-conditioned or truncation-dominated computation), 4 I/O failure.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import __version__
from .linalg import NumericalError, ValidationError
from .scenario import ScenarioError, execute, emit, parse_scenario

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


def _threads(args: argparse.Namespace) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("ZENOLAB_THREADS")
    if env is not None:
        try:
            value = int(env)
        except ValueError:
            raise ValidationError(f"ZENOLAB_THREADS must be an integer, got {env!r}")
        if value < 1:
            raise ValidationError("ZENOLAB_THREADS must be >= 1")
        return value
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zenolab",
        description="Run quantum-Zeno / Mach-Zehnder scenario files.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a scenario and emit its result table")
    run.add_argument("scenario", help="path to a scenario JSON file")
    run.add_argument("-o", "--output", default=None, help="output path (default: stdout)")
    run.add_argument("-f", "--format", choices=("csv", "json"), default="csv")
    run.add_argument(
        "--reproducible",
        action="store_true",
        help="omit the timestamp so identical inputs give identical bytes",
    )
    run.add_argument(
        "--threads",
        type=int,
        default=None,
        help="worker threads for grid scans (default: ZENOLAB_THREADS or 1)",
    )

    val = sub.add_parser("validate", help="check a scenario file without running it")
    val.add_argument("scenario", help="path to a scenario JSON file")

    sub.add_parser("version", help="print the tool version")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "version":
            print(__version__)
            return EXIT_OK
        if args.command == "validate":
            scenario = parse_scenario(args.scenario)
            print(f"ok: {args.scenario} ({scenario.kind})")
            return EXIT_OK
        # run
        threads = _threads(args)
        if threads < 1:
            raise ValidationError("--threads must be >= 1")
        scenario = parse_scenario(args.scenario)
        table = execute(scenario, threads=threads, reproducible=args.reproducible)
        emit(table, args.format, args.output)
        return EXIT_OK
    except ScenarioError as exc:
        for err in exc.errors:
            print(f"error: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
