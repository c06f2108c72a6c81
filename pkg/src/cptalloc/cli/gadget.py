#!/usr/bin/env python3
"""Build and solve the partition gadget for a list of integers.

Usage:
    cptalloc gadget --integers 1,2,3 [--epsilon 0.1]
"""

import argparse
import logging
import sys

from pydantic import ValidationError

from cptalloc.cli.common import (
    EXIT_SUCCESS,
    add_common_arguments,
    fmt,
    load_settings,
    output_dir,
    parse_integers,
    report_error,
    report_options_error,
)
from cptalloc.core.artifacts import ArtifactWriter
from cptalloc.core.exceptions import CptAllocError
from cptalloc.core.reduction import DEFAULT_EPSILON, solve_partition
from cptalloc.models import ReductionOptions

logger = logging.getLogger(__name__)


def create_parser() -> argparse.ArgumentParser:
    """Create the argument parser."""
    parser = argparse.ArgumentParser(
        prog="cptalloc gadget",
        description="Decide integer partition through the lottery gadget",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
    cptalloc gadget --integers 1,2,3          # partition exists: {3} vs {1,2}
    cptalloc gadget --integers 1,2,4          # no partition
        """,
    )
    parser.add_argument(
        "--integers",
        "-n",
        required=True,
        help="Comma-separated positive integers",
    )
    parser.add_argument(
        "--epsilon",
        "-e",
        type=float,
        default=DEFAULT_EPSILON,
        help=f"Weight on the second outcome, in (0, 1/2) (default: {DEFAULT_EPSILON})",
    )
    parser.add_argument(
        "--n-max",
        type=int,
        default=8,
        help="Largest number of integers accepted (default: 8)",
    )
    add_common_arguments(parser)
    return parser


def main(args: list[str] | None = None) -> int:
    """Main entry point for the gadget command.

    Args:
        args: Command line arguments (uses sys.argv if None)

    Returns:
        Exit code (0 success, 1 invalid input, 3 too many integers)
    """
    parser = create_parser()
    parsed_args = parser.parse_args(args)

    try:
        settings = load_settings(parsed_args)
        integers = parse_integers(parsed_args.integers)
        options = ReductionOptions(n_max=parsed_args.n_max)
        gadget, result, exists = solve_partition(integers, options, parsed_args.epsilon)

        report = gadget.to_dict()
        report["W_ps"] = result.value
        report["partition_exists"] = exists
        report["pi_star"] = result.profile.tolist()
        writer = ArtifactWriter(output_dir(parsed_args, settings), command="gadget")
        path = writer.write_json("gadget.json", report)
    except ValidationError as e:
        return report_options_error(e)
    except CptAllocError as e:
        return report_error(e)

    print(f"T:    {fmt(gadget.threshold)}")
    print(f"W_ps: {fmt(result.value)}")
    if exists:
        print("✓ Partition exists")
    else:
        print("✗ No partition")
    print(f"Report written to {path}")
    return EXIT_SUCCESS


if __name__ == "__main__":
    sys.exit(main())
