"""Command-line interface.

    rootlocus compute <problem.json> --out <dir> [--svg]
                      [--window SLO SHI WLO WHI] [--workers N]

Exit codes: 0 success, 2 parse error, 3 validation error, 4 numerical
failure (stalled trajectories or solver breakdown).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .engine import compute_root_locus
from .errors import ParseError, RootLocusError, ValidationError
from .io import emit_results, parse_problem
from .svg import render_svg

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_NUMERICAL = 4

log = logging.getLogger("rootlocus")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rootlocus",
        description="Root locus of SISO dead-time systems in a right half-plane.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    comp = sub.add_parser("compute", help="compute a root locus from a problem file")
    comp.add_argument("problem", help="path to the JSON problem file")
    comp.add_argument("--out", required=True, help="output directory for result files")
    comp.add_argument("--svg", action="store_true", help="also render rootlocus.svg")
    comp.add_argument(
        "--window",
        nargs=4,
        type=float,
        metavar=("SLO", "SHI", "WLO", "WHI"),
        help="plot window: sigma and omega bounds for the SVG",
    )
    comp.add_argument("--workers", type=int, default=1, help="trajectory tracing threads")
    return parser


def _configure_logging() -> None:
    level_name = os.environ.get("ROOTLOCUS_LOG", "WARNING").upper()
    level = getattr(logging, level_name, logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def main(argv: list[str] | None = None) -> int:
    _configure_logging()
    args = _build_parser().parse_args(argv)

    try:
        problem, config = parse_problem(args.problem)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    log.info("problem parsed: %s locus, sigma0=%g, lambda_max=%g",
             problem.kind.value, problem.sigma0, problem.lambda_max)
    try:
        result = compute_root_locus(problem, config, workers=args.workers)
    except RootLocusError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    try:
        written = emit_results(result, args.out)
        if args.svg:
            window = tuple(args.window) if args.window else None
            upper = result.problem.plant.conjugate_symmetric and window is None
            doc = render_svg(result, window=window, upper_half_only=upper)
            path = os.path.join(args.out, "rootlocus.svg")
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(doc)
            written.append(path)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    for w in result.warnings:
        print(f"warning: {w}", file=sys.stderr)
    log.info("wrote %d files to %s", len(written), args.out)
    if result.warnings:
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
