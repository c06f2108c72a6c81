#!/usr/bin/env python3
"""Solve the average system problem.

Only mean allocations are constrained by capacity, so each agent picks
its best lottery around a mean. The report carries per-agent
tail-structure verdicts.

Usage:
    cptalloc solve-avg --input instance.json
"""

import argparse
import logging
import sys

from pydantic import ValidationError

from cptalloc.cli.common import (
    EXIT_SUCCESS,
    add_common_arguments,
    fmt,
    fmt_array,
    load_instance,
    load_settings,
    output_dir,
    report_error,
    report_options_error,
)
from cptalloc.core.artifacts import ArtifactWriter
from cptalloc.core.avg import solve_sys_avg
from cptalloc.core.exceptions import EXIT_NOT_CONVERGED, CptAllocError
from cptalloc.models import AvgOptions

logger = logging.getLogger(__name__)


def create_parser() -> argparse.ArgumentParser:
    """Create the argument parser."""
    parser = argparse.ArgumentParser(
        prog="cptalloc solve-avg",
        description="Solve the average system problem",
    )
    parser.add_argument(
        "--input",
        "-i",
        required=True,
        help="Path to the instance JSON file",
    )
    add_common_arguments(parser)
    return parser


def main(args: list[str] | None = None) -> int:
    """Main entry point for the solve-avg command.

    Args:
        args: Command line arguments (uses sys.argv if None)

    Returns:
        Exit code (0 success, 1 invalid input, 2 not converged)
    """
    parser = create_parser()
    parsed_args = parser.parse_args(args)

    try:
        settings = load_settings(parsed_args)
        instance = load_instance(parsed_args.input)
        report = solve_sys_avg(instance, AvgOptions(kkt_tol=settings.kkt_tol))
        writer = ArtifactWriter(output_dir(parsed_args, settings), command="solve-avg")
        path = writer.write_json("solve_avg.json", report.to_dict())
    except ValidationError as e:
        return report_options_error(e)
    except CptAllocError as e:
        return report_error(e)

    print(f"W_pa: {fmt(report.value)}")
    print(f"z_bar = {fmt_array(report.z_bar)}")
    print(f"lambda_bar = {fmt_array(report.lambda_bar)}")
    for i, verdict in enumerate(report.tail_structure):
        label = "n/a" if verdict is None else ("holds" if verdict else "violated")
        print(f"  player {i}: tail structure {label}")
    print(f"Report written to {path}")

    if not report.converged:
        print("✗ Solver did not reach the KKT tolerance")
        return EXIT_NOT_CONVERGED
    return EXIT_SUCCESS


if __name__ == "__main__":
    sys.exit(main())
