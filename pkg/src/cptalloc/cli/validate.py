#!/usr/bin/env python3
"""Validate a network instance file.

Reports every broken invariant at once instead of stopping at the first.

Usage:
    cptalloc validate --input instance.json
"""

import argparse
import logging
import sys

from cptalloc.cli.common import (
    EXIT_SUCCESS,
    add_common_arguments,
    load_instance,
    load_settings,
    report_error,
)
from cptalloc.core.exceptions import EXIT_INVALID_INPUT, CptAllocError
from cptalloc.core.validation import validate_instance

logger = logging.getLogger(__name__)


def create_parser() -> argparse.ArgumentParser:
    """Create the argument parser."""
    parser = argparse.ArgumentParser(
        prog="cptalloc validate",
        description="Check a network instance file for errors",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Instance format:
    {"capacities": [2.9], "routes": [[0], [0]], "k": 2,
     "agents": [{"value": {"family": "log_affine", "params": {...}},
                 "weights": {"family": "kt", "params": {"gamma": 0.61}}}, ...]}
        """,
    )
    parser.add_argument(
        "--input",
        "-i",
        required=True,
        help="Path to the instance JSON file",
    )
    add_common_arguments(parser, output=False)
    return parser


def main(args: list[str] | None = None) -> int:
    """Main entry point for the validate command.

    Args:
        args: Command line arguments (uses sys.argv if None)

    Returns:
        Exit code (0 if valid, 1 otherwise)
    """
    parser = create_parser()
    parsed_args = parser.parse_args(args)

    try:
        load_settings(parsed_args)
        instance = load_instance(parsed_args.input)
        result = validate_instance(instance)
    except CptAllocError as e:
        return report_error(e)

    if not result.is_valid:
        print(f"\n✗ Found {result.error_count} problem(s) in {parsed_args.input}:")
        for message in result.messages():
            print(f"  - {message}")
        return EXIT_INVALID_INPUT

    print(
        f"✓ Valid instance: {instance.num_players} players, "
        f"{instance.num_links} links, k={instance.k}"
    )
    return EXIT_SUCCESS


if __name__ == "__main__":
    sys.exit(main())
