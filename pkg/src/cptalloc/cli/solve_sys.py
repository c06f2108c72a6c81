#!/usr/bin/env python3
"""Solve the full system problem by searching permutation profiles.

Usage:
    cptalloc solve-sys --input instance.json [--method exhaustive|local]
        [--budget N] [--restarts R] [--workers W] [--seed S] [--oracle]
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
from cptalloc.core.exceptions import EXIT_NOT_CONVERGED, BudgetExceededError, CptAllocError
from cptalloc.core.oracle import MAX_OUTCOMES, MAX_PLAYERS, grid_brute_force_sys
from cptalloc.core.permsearch import solve_sys
from cptalloc.models import SearchMethod, SearchOptions, SolverOptions

logger = logging.getLogger(__name__)


def create_parser() -> argparse.ArgumentParser:
    """Create the argument parser."""
    parser = argparse.ArgumentParser(
        prog="cptalloc solve-sys",
        description="Search permutation profiles for the best lottery allocation",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
    cptalloc solve-sys --input example2.json
    cptalloc solve-sys --input big.json --method local --restarts 8 --seed 3
    cptalloc solve-sys --input small.json --oracle --grid-step 0.02
        """,
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
        help="Search strategy (default: exhaustive)",
    )
    parser.add_argument(
        "--budget",
        type=int,
        default=10_000,
        help="Maximum profiles for exhaustive search (default: 10000)",
    )
    parser.add_argument(
        "--restarts",
        type=int,
        default=4,
        help="Random restarts for local search (default: 4)",
    )
    parser.add_argument(
        "--workers",
        type=int,
        help="Worker processes (default: CPTALLOC_WORKERS or 1)",
    )
    parser.add_argument(
        "--seed",
        type=int,
        help="Random seed (default: CPTALLOC_SEED or 0)",
    )
    parser.add_argument(
        "--oracle",
        action="store_true",
        help=f"Cross-check with the grid oracle (n <= {MAX_PLAYERS}, k <= {MAX_OUTCOMES})",
    )
    parser.add_argument(
        "--grid-step",
        type=float,
        default=0.01,
        help="Grid step for --oracle (default: 0.01)",
    )
    add_common_arguments(parser)
    return parser


def main(args: list[str] | None = None) -> int:
    """Main entry point for the solve-sys command.

    Args:
        args: Command line arguments (uses sys.argv if None)

    Returns:
        Exit code (0 success, 1 invalid input, 2 not converged, 3 budget exceeded)
    """
    parser = create_parser()
    parsed_args = parser.parse_args(args)

    try:
        settings = load_settings(parsed_args)
        instance = load_instance(parsed_args.input)
        options = SearchOptions(
            method=SearchMethod(parsed_args.method),
            budget=parsed_args.budget,
            restarts=parsed_args.restarts,
            seed=settings.seed if parsed_args.seed is None else parsed_args.seed,
            workers=parsed_args.workers or settings.workers,
            solver=SolverOptions(kkt_tol=settings.kkt_tol),
        )
        result = solve_sys(instance, options)
        report = result.to_dict()

        if parsed_args.oracle:
            if instance.num_players > MAX_PLAYERS or instance.k > MAX_OUTCOMES:
                raise BudgetExceededError(
                    f"--oracle needs n <= {MAX_PLAYERS} and k <= {MAX_OUTCOMES}"
                )
            oracle = grid_brute_force_sys(instance, grid_step=parsed_args.grid_step)
            report["oracle"] = oracle.to_dict()

        writer = ArtifactWriter(output_dir(parsed_args, settings), command="solve-sys")
        path = writer.write_json("solve_sys.json", report)
    except ValidationError as e:
        return report_options_error(e)
    except CptAllocError as e:
        return report_error(e)

    print(f"W_ps: {fmt(result.value)} ({result.method}, {result.evaluations} profiles)")
    print(f"pi* =\n{result.profile.tolist()}")
    print(f"z =\n{fmt_array(result.report.scheme.z)}")
    if parsed_args.oracle:
        print(f"Grid oracle: {fmt(oracle.value)} (within {fmt(oracle.bound)} of the optimum)")
        if oracle.value > result.value + 1e-6:
            logger.warning(
                "Grid oracle found %.6f above the searched value %.6f",
                oracle.value,
                result.value,
            )
    print(f"Report written to {path}")

    if not result.report.converged:
        print("✗ Best profile's solve did not reach the KKT tolerance")
        return EXIT_NOT_CONVERGED
    return EXIT_SUCCESS


if __name__ == "__main__":
    sys.exit(main())
