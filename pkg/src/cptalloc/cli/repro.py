#!/usr/bin/env python3
"""Reproduce the two reference examples.

example1: ten power/kt players on one link; scans the cyclic lottery
    U(x) and compares it with the best deterministic allocation.
example2: two players with explicit weights; primal optimum, dual
    minimum, duality gap and the case-restricted dual table.

Usage:
    cptalloc-repro example1 [--step 0.01]
    cptalloc-repro example2
"""

import argparse
import logging
import sys

from cptalloc.cli.common import (
    EXIT_SUCCESS,
    add_common_arguments,
    fmt,
    load_settings,
    output_dir,
    report_error,
)
from cptalloc.core.artifacts import ArtifactWriter
from cptalloc.core.exceptions import CptAllocError
from cptalloc.core.instances import example1_instance, example1_scan, example2_instance
from cptalloc.core.permsearch import case_table_example2, duality_gap
from cptalloc.core.solver_fix import solve_deterministic

logger = logging.getLogger(__name__)

EXAMPLES = ("example1", "example2")


def create_parser() -> argparse.ArgumentParser:
    """Create the argument parser."""
    parser = argparse.ArgumentParser(
        prog="cptalloc repro",
        description="Reproduce the reference examples",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Outputs:
    example1    example1.json (x_star, value, deterministic), example1_curve.csv (x, U)
    example2    example2.json (W_ps, W_ds, gap, pi_star, lambda_star, cases)
        """,
    )
    parser.add_argument(
        "example",
        choices=EXAMPLES,
        help="Which example to reproduce",
    )
    parser.add_argument(
        "--step",
        type=float,
        default=0.01,
        help="Scan step for example1's U(x) curve (default: 0.01)",
    )
    add_common_arguments(parser)
    return parser


def run_example1(writer: ArtifactWriter, step: float) -> None:
    """Scan the cyclic lottery and write the result and the curve."""
    print("Scanning U(x) for the ten-player example...")
    x_star, value, curve = example1_scan(step)
    deterministic = solve_deterministic(example1_instance())

    writer.write_csv("example1_curve.csv", ["x", "U"], curve.tolist())
    path = writer.write_json(
        "example1.json",
        {"x_star": x_star, "value": value, "deterministic": deterministic.value},
    )
    print(f"x*: {fmt(x_star)}")
    print(f"U*: {fmt(value)}")
    print(f"Best deterministic allocation: {fmt(deterministic.value)}")
    print(f"Report written to {path}")


def run_example2(writer: ArtifactWriter) -> None:
    """Primal, dual and case table of the two-player example."""
    instance = example2_instance()
    print("Solving the two-player example...")
    gap = duality_gap(instance)
    cases = case_table_example2()

    report = gap.to_dict()
    report["cases"] = [case.to_dict() for case in cases]
    path = writer.write_json("example2.json", report)

    print(f"W_ps: {fmt(gap.w_ps)}")
    print(f"W_ds: {fmt(gap.w_ds)}")
    print(f"gap:  {fmt(gap.gap)}")
    print("Case-restricted dual minima:")
    for case in cases:
        print(f"  ({case.player1_case},{case.player2_case}): {fmt(case.value)}")
    print(f"Report written to {path}")


def main(args: list[str] | None = None) -> int:
    """Main entry point for the repro command.

    Args:
        args: Command line arguments (uses sys.argv if None)

    Returns:
        Exit code (0 for success, non-zero for errors)
    """
    parser = create_parser()
    parsed_args = parser.parse_args(args)

    try:
        settings = load_settings(parsed_args)
        writer = ArtifactWriter(
            output_dir(parsed_args, settings),
            command=f"repro {parsed_args.example}",
        )
        if parsed_args.example == "example1":
            run_example1(writer, parsed_args.step)
        else:
            run_example2(writer)
    except CptAllocError as e:
        return report_error(e)

    return EXIT_SUCCESS


if __name__ == "__main__":
    sys.exit(main())
