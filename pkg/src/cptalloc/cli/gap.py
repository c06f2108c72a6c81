#!/usr/bin/env python3
"""Measure the duality gap of the full system problem.

Usage:
    cptalloc gap --input instance.json [--method exhaustive|local]
"""

import argparse
import logging
import sys

from pydantic import ValidationError

from cptalloc.cli.common import (
    EXIT_SUCCESS,
    add_common_arguments,
    fmt,
    load_instance,
    load_settings,
    output_dir,
    report_error,
    report_options_error,
)
from cptalloc.core.artifacts import ArtifactWriter
from cptalloc.core.exceptions import CptAllocError
from cptalloc.core.permsearch import duality_gap
from cptalloc.models import DualOptions, SearchMethod, SearchOptions

logger = logging.getLogger(__name__)


def create_parser() -> argparse.ArgumentParser:
    """Create the argument parser."""
    parser = argparse.ArgumentParser(
        prog="cptalloc gap",
        description="Compare the primal optimum with the dual minimum",
    )
    parser.add_argument(
        "--input",
        "-i",
        required=True,
        help="Path to the instance JSON file",
    )
    parser.add_argument(
        "--method",
        "-m",
        choices=[m.value for m in SearchMethod],
        default=SearchMethod.EXHAUSTIVE.value,
        help="Primal search strategy (default: exhaustive)",
    )
    parser.add_argument(
        "--seed",
        type=int,
        help="Random seed for local search (default: CPTALLOC_SEED or 0)",
    )
    add_common_arguments(parser)
    return parser


def main(args: list[str] | None = None) -> int:
    """Main entry point for the gap command.

    Args:
        args: Command line arguments (uses sys.argv if None)

    Returns:
        Exit code (0 success, 1 invalid input, 3 budget exceeded)
    """
    parser = create_parser()
    parsed_args = parser.parse_args(args)

    try:
        settings = load_settings(parsed_args)
        instance = load_instance(parsed_args.input)
        search = SearchOptions(
            method=SearchMethod(parsed_args.method),
            seed=settings.seed if parsed_args.seed is None else parsed_args.seed,
            workers=settings.workers,
        )
        report = duality_gap(instance, DualOptions(search=search))
        writer = ArtifactWriter(output_dir(parsed_args, settings), command="gap")
        path = writer.write_json("gap.json", report.to_dict())
    except ValidationError as e:
        return report_options_error(e)
    except CptAllocError as e:
        return report_error(e)

    print(f"W_ps: {fmt(report.w_ps)}")
    print(f"W_ds: {fmt(report.w_ds)}")
    print(f"gap:  {fmt(report.gap)}")
    if report.ordering_consistent is not None:
        print(f"Opposite ordering at lambda*: {report.ordering_consistent}")
    print(f"Report written to {path}")
    return EXIT_SUCCESS


if __name__ == "__main__":
    sys.exit(main())
