#!/usr/bin/env python3
"""Evaluate the CPT value of a prospect for one agent.

Usage:
    cptalloc cpt-value --agent agent.json --prospect 0.1:9.79,0.9:0.02
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
    read_json,
    report_error,
)
from cptalloc.core.cpt import cpt_value
from cptalloc.core.exceptions import CptAllocError, InvalidInputError
from cptalloc.models import AgentSpec

logger = logging.getLogger(__name__)


def create_parser() -> argparse.ArgumentParser:
    """Create the argument parser."""
    parser = argparse.ArgumentParser(
        prog="cptalloc cpt-value",
        description="Compute the CPT value of a prospect",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
    cptalloc cpt-value --agent agent.json --prospect 0.5:1,0.5:0
    cptalloc cpt-value --agent '{"value": {"family": "linear"},
        "weights": {"family": "identity"}}' --prospect 1:2.5
        """,
    )
    parser.add_argument(
        "--agent",
        "-a",
        required=True,
        help="AgentSpec as a JSON file or inline JSON",
    )
    parser.add_argument(
        "--prospect",
        "-p",
        required=True,
        help="Comma-separated probability:outcome pairs",
    )
    add_common_arguments(parser, output=False)
    return parser


def parse_prospect(text: str) -> list[tuple[float, float]]:
    """Parse '0.1:9.79,0.9:0.02' into (probability, outcome) pairs."""
    pairs = []
    for item in text.split(","):
        if not item.strip():
            continue
        try:
            p, y = item.split(":")
            pairs.append((float(p), float(y)))
        except ValueError as e:
            raise InvalidInputError(f"Invalid prospect entry '{item}', expected p:x") from e
    return pairs


def main(args: list[str] | None = None) -> int:
    """Main entry point for the cpt-value command.

    Args:
        args: Command line arguments (uses sys.argv if None)

    Returns:
        Exit code (0 for success, non-zero for errors)
    """
    parser = create_parser()
    parsed_args = parser.parse_args(args)

    try:
        load_settings(parsed_args)
        agent = AgentSpec.from_json(read_json(parsed_args.agent))
        value = cpt_value(agent, parse_prospect(parsed_args.prospect))
    except ValidationError as e:
        return report_error(InvalidInputError(f"Invalid agent: {e}"))
    except CptAllocError as e:
        return report_error(e)

    print(f"CPT value: {fmt(value)}")
    return EXIT_SUCCESS


if __name__ == "__main__":
    sys.exit(main())
