#!/usr/bin/env python3
"""Minimize the dual function over link prices.

Usage:
    cptalloc dual --input instance.json [--max-dim 6]
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
from cptalloc.core.exceptions import CptAllocError
from cptalloc.core.permsearch import dual_minimize
from cptalloc.models import DualOptions

logger = logging.getLogger(__name__)


def create_parser() -> argparse.ArgumentParser:
    """Create the argument parser."""
    parser = argparse.ArgumentParser(
        prog="cptalloc dual",
        description="Minimize the dual function over link prices",
    )
    parser.add_argument(
        "--input",
        "-i",
        required=True,
        help="Path to the instance JSON file",
    )
    parser.add_argument(
        "--max-dim",
        type=int,
        default=6,
        help="Largest m*k accepted (default: 6)",
    )
    parser.add_argument(
        "--grid-budget",
        type=int,
        default=4_000,
        help="Grid points scanned before refinement (default: 4000)",
    )
    add_common_arguments(parser)
    return parser


def main(args: list[str] | None = None) -> int:
    """Main entry point for the dual command.

    Args:
        args: Command line arguments (uses sys.argv if None)

    Returns:
        Exit code (0 success, 1 invalid input, 3 too many dual variables)
    """
    parser = create_parser()
    parsed_args = parser.parse_args(args)

    try:
        settings = load_settings(parsed_args)
        instance = load_instance(parsed_args.input)
        options = DualOptions(max_dim=parsed_args.max_dim, grid_budget=parsed_args.grid_budget)
        result = dual_minimize(instance, options)
        writer = ArtifactWriter(output_dir(parsed_args, settings), command="dual")
        path = writer.write_json("dual.json", result.to_dict())
    except ValidationError as e:
        return report_options_error(e)
    except CptAllocError as e:
        return report_error(e)

    print(f"W_ds: {fmt(result.value)} ({result.evaluations} evaluations)")
    print(f"lambda* =\n{fmt_array(result.lam)}")
    print(f"Report written to {path}")
    return EXIT_SUCCESS


if __name__ == "__main__":
    sys.exit(main())
