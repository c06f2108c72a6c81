#!/usr/bin/env python3
"""Main CLI entry point for cptalloc.

Provides a unified interface for all cptalloc commands.

Usage:
    cptalloc validate --input instance.json
    cptalloc solve-fix --input instance.json --pi "0,1;1,0"
    cptalloc repro example2
"""

import argparse
import sys
from types import ModuleType

from cptalloc import __version__
from cptalloc.cli import (
    cpt_value,
    dual,
    gadget,
    gap,
    repro,
    solve_avg,
    solve_fix,
    solve_sys,
    validate,
    weights_table,
)

COMMANDS: dict[str, tuple[ModuleType, str]] = {
    "validate": (validate, "Validate an instance file"),
    "cpt-value": (cpt_value, "CPT value of a prospect"),
    "weights-table": (weights_table, "Weighting function table with p* and l*"),
    "solve-fix": (solve_fix, "Solve for a fixed permutation profile"),
    "solve-sys": (solve_sys, "Search permutation profiles"),
    "solve-avg": (solve_avg, "Solve the average problem"),
    "dual": (dual, "Minimize the dual function"),
    "gap": (gap, "Measure the duality gap"),
    "gadget": (gadget, "Decide partition through the gadget"),
    "repro": (repro, "Reproduce example1 or example2"),
}


def create_parser() -> argparse.ArgumentParser:
    """Create the main argument parser with subcommands."""
    parser = argparse.ArgumentParser(
        prog="cptalloc",
        description="Optimal lottery allocation of network throughput to CPT agents",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Commands:
    validate       Validate an instance file
    cpt-value      CPT value of a prospect
    weights-table  Weighting function table with p* and l*
    solve-fix      Solve for a fixed permutation profile
    solve-sys      Search permutation profiles
    solve-avg      Solve the average problem
    dual           Minimize the dual function
    gap            Measure the duality gap
    gadget         Decide partition through the gadget
    repro          Reproduce example1 or example2

Exit codes:
    0 success, 1 invalid input, 2 not converged, 3 budget exceeded

For more information on a specific command:
    cptalloc <command> --help
        """,
    )
    parser.add_argument(
        "--version",
        "-V",
        action="version",
        version=f"cptalloc {__version__}",
    )
    parser.add_argument(
        "--verbose",
        "-v",
        action="store_true",
        help="Enable verbose output",
    )

    subparsers = parser.add_subparsers(dest="command", help="Available commands")
    for name, (_, help_text) in COMMANDS.items():
        # Options are parsed by the command module itself
        subparsers.add_parser(name, help=help_text, add_help=False)

    return parser


def main(args: list[str] | None = None) -> int:
    """Main entry point for the cptalloc CLI.

    Args:
        args: Command line arguments (uses sys.argv if None)

    Returns:
        Exit code (0 for success, non-zero for errors)
    """
    parser = create_parser()
    parsed_args, rest = parser.parse_known_args(args)

    if not parsed_args.command:
        parser.print_help()
        return 0

    module, _ = COMMANDS[parsed_args.command]
    command_args = list(rest)
    if parsed_args.verbose and "--verbose" not in command_args and "-v" not in command_args:
        command_args.append("--verbose")
    exit_code: int = module.main(command_args)
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
