#!/usr/bin/env python3
"""Tabulate a probability weighting function and its concave envelope.

Usage:
    cptalloc weights-table --family kt --param 0.61 [--step 0.01] [--k 10]
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
    report_error,
)
from cptalloc.core.artifacts import ArtifactWriter
from cptalloc.core.cpt import lstar, pstar, weights_table
from cptalloc.core.exceptions import CptAllocError, InvalidInputError, StructureUndefinedError
from cptalloc.models import WeightingFamily, WeightingFunctionSpec

logger = logging.getLogger(__name__)

PARAM_NAMES = {
    WeightingFamily.IDENTITY: None,
    WeightingFamily.KT: "gamma",
    WeightingFamily.POWER_CONVEX: "a",
}


def create_parser() -> argparse.ArgumentParser:
    """Create the argument parser."""
    parser = argparse.ArgumentParser(
        prog="cptalloc weights-table",
        description="Write (p, w(p), w*(p)) as CSV and report p* and l*",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Families:
    identity        w(p) = p
    kt              w(p) = p^g / (p^g + (1-p)^g)^(1/g), --param g in (0, 1]
    power_convex    w(p) = p^a, --param a > 1
        """,
    )
    parser.add_argument(
        "--family",
        "-f",
        choices=[f.value for f in WeightingFamily],
        default=WeightingFamily.KT.value,
        help="Weighting family (default: kt)",
    )
    parser.add_argument(
        "--param",
        type=float,
        help="Family parameter (gamma for kt, a for power_convex)",
    )
    parser.add_argument(
        "--step",
        type=float,
        default=0.01,
        help="Grid step on [0, 1] (default: 0.01)",
    )
    parser.add_argument(
        "--k",
        type=int,
        help="Outcome count for reporting the tail index l*",
    )
    add_common_arguments(parser)
    return parser


def build_weighting(family: str, param: float | None) -> WeightingFunctionSpec:
    """Weighting spec from a family name and its single parameter."""
    kind = WeightingFamily(family)
    name = PARAM_NAMES[kind]
    if name is None:
        return WeightingFunctionSpec.identity()
    if param is None:
        raise InvalidInputError(f"Family {family} needs --param ({name})")
    try:
        return WeightingFunctionSpec(family=kind, params={name: param})
    except ValidationError as e:
        raise InvalidInputError(f"Invalid weighting parameters: {e}") from e


def main(args: list[str] | None = None) -> int:
    """Main entry point for the weights-table command.

    Args:
        args: Command line arguments (uses sys.argv if None)

    Returns:
        Exit code (0 for success, non-zero for errors)
    """
    parser = create_parser()
    parsed_args = parser.parse_args(args)

    try:
        settings = load_settings(parsed_args)
        wf = build_weighting(parsed_args.family, parsed_args.param)
        rows = weights_table(wf, parsed_args.step)
        p_star = pstar(wf)
        writer = ArtifactWriter(output_dir(parsed_args, settings), command="weights-table")
        path = writer.write_csv("weights_table.csv", ["p", "w", "w_star"], rows)
    except CptAllocError as e:
        return report_error(e)

    print(f"Wrote {len(rows)} rows to {path}")
    print(f"p* = {fmt(p_star)}")
    if parsed_args.k:
        try:
            print(f"l* = {lstar(p_star, parsed_args.k)} (k = {parsed_args.k}, 0-based)")
        except StructureUndefinedError as e:
            print(f"l* undefined: {e.message}")
    return EXIT_SUCCESS


if __name__ == "__main__":
    sys.exit(main())
