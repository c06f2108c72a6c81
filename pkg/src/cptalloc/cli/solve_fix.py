#!/usr/bin/env python3
"""Solve the system problem for a fixed permutation profile.

Writes the allocation, link and player prices and the KKT residual, and
optionally checks the market equilibrium conditions at the solution.

Usage:
    cptalloc-solve --input instance.json --pi "0,1;1,0" [--method dual] [--trace]
"""

import argparse
import logging
import sys
from typing import Any

from pydantic import ValidationError

from cptalloc.cli.common import (
    EXIT_SUCCESS,
    add_common_arguments,
    fmt,
    fmt_array,
    load_instance,
    load_settings,
    output_dir,
    parse_profile,
    report_error,
    report_options_error,
)
from cptalloc.core.artifacts import ArtifactWriter
from cptalloc.core.exceptions import EXIT_NOT_CONVERGED, CptAllocError
from cptalloc.core.network import cyclic_profile
from cptalloc.core.solver_fix import check_equilibrium, solve_sys_fix
from cptalloc.models import FixMethod, SolverOptions

logger = logging.getLogger(__name__)


def create_parser() -> argparse.ArgumentParser:
    """Create the argument parser."""
    parser = argparse.ArgumentParser(
        prog="cptalloc solve-fix",
        description="Solve the fixed-permutation system problem",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Profiles are 0-based outcome-to-rank maps, one row per player:
    --pi "0,1;1,0"      player 0 ranks outcome 0 first, player 1 outcome 1
    --pi "[[0,1],[1,0]]"
Without --pi the cyclic profile pi_i(l) = (l + i) mod k is used.

Examples:
    cptalloc-solve --input example2.json --pi "0,1;1,0"
    cptalloc-solve --input example2.json --pi "0,1;1,0" --method tatonnement --trace
        """,
    )
    parser.add_argument(
        "--input",
        "-i",
        required=True,
        help="Path to the instance JSON file",
    )
    parser.add_argument(
        "--pi",
        help="Permutation profile (default: cyclic)",
    )
    parser.add_argument(
        "--method",
        "-m",
        choices=[m.value for m in FixMethod],
        default=FixMethod.DUAL.value,
        help="Solver (default: dual)",
    )
    parser.add_argument(
        "--kkt-tol",
        type=float,
        help="KKT residual tolerance (default: CPTALLOC_KKT_TOL or 1e-8)",
    )
    parser.add_argument(
        "--max-iter",
        type=int,
        help="Iteration limit for the subgradient solver",
    )
    parser.add_argument(
        "--trace",
        action="store_true",
        help="Write the iteration trajectory as CSV",
    )
    parser.add_argument(
        "--check",
        action="store_true",
        help="Also verify the market equilibrium conditions",
    )
    add_common_arguments(parser)
    return parser


def main(args: list[str] | None = None) -> int:
    """Main entry point for the solve-fix command.

    Args:
        args: Command line arguments (uses sys.argv if None)

    Returns:
        Exit code (0 converged, 1 invalid input, 2 not converged)
    """
    parser = create_parser()
    parsed_args = parser.parse_args(args)

    try:
        settings = load_settings(parsed_args)
        instance = load_instance(parsed_args.input)
        if parsed_args.pi:
            profile = parse_profile(parsed_args.pi)
        else:
            profile = cyclic_profile(instance.num_players, instance.k)

        overrides: dict[str, Any] = {
            "method": FixMethod(parsed_args.method),
            "kkt_tol": parsed_args.kkt_tol or settings.kkt_tol,
            "trace": parsed_args.trace,
        }
        if parsed_args.max_iter:
            overrides["max_iter"] = parsed_args.max_iter
        options = SolverOptions(**overrides)

        report = solve_sys_fix(instance, profile, options)
        writer = ArtifactWriter(output_dir(parsed_args, settings), command="solve-fix")
        result = report.to_dict()
        if parsed_args.check:
            check = check_equilibrium(instance, profile, report)
            result["equilibrium"] = check.to_dict()
        path = writer.write_json("solve_fix.json", result)

        if parsed_args.trace and report.trajectory:
            writer.write_csv(
                "trace.csv",
                ["iteration", "value", "max_violation"],
                ([r.iteration, r.value, r.max_violation] for r in report.trajectory),
            )
    except ValidationError as e:
        return report_options_error(e)
    except CptAllocError as e:
        return report_error(e)

    print(f"Value: {fmt(report.value)} ({report.method}, {report.iterations} iterations)")
    print(f"KKT residual: {fmt(report.kkt_residual)}")
    print(f"z =\n{fmt_array(report.scheme.z)}")
    print(f"lambda =\n{fmt_array(report.prices.lam)}")
    if parsed_args.check:
        print(f"Equilibrium residual: {fmt(check.max_residual)}")
    print(f"Report written to {path}")

    if not report.converged:
        print("✗ Solver did not reach the KKT tolerance")
        return EXIT_NOT_CONVERGED
    return EXIT_SUCCESS


if __name__ == "__main__":
    sys.exit(main())
