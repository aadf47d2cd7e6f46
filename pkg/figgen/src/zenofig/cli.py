"""Command-line entry point: zenolab-fig <figure-spec-file> [...].

Exit codes: 0 success, 2 spec/table validation failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .figures import FigureSpecError, load_figure_spec, render
from .tables import TableError

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 4


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="zenolab-fig",
        description="Render figures from zenolab result tables.",
    )
    parser.add_argument("specs", nargs="+", help="figure-spec JSON file(s)")
    parser.add_argument("--version", action="version", version=__version__)
    args = parser.parse_args(argv)
    try:
        for path in args.specs:
            summary = render(load_figure_spec(path))
            for out in summary.outputs:
                print(f"wrote {out}")
            for label, slope in summary.slopes.items():
                print(f"  slope[{label}] = {slope:.4f}")
        return EXIT_OK
    except (FigureSpecError, TableError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
