"""Helpers shared by the subcommands: input files, settings and output."""

import argparse
import json
import logging
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import ValidationError

from cptalloc.cli.logging_config import setup_logging
from cptalloc.core.config import Settings
from cptalloc.core.exceptions import (
    EXIT_INVALID_INPUT,
    CptAllocError,
    InvalidInputError,
    InvalidInstanceError,
)
from cptalloc.models import IntArray, NetworkInstance

logger = logging.getLogger(__name__)

EXIT_SUCCESS = 0


def add_common_arguments(parser: argparse.ArgumentParser, output: bool = True) -> None:
    """Add --verbose, --env-file and (optionally) --output-dir."""
    if output:
        parser.add_argument(
            "--output-dir",
            "-o",
            help="Directory for JSON/CSV artifacts (default: CPTALLOC_OUTPUT_DIR or ./results)",
        )
    parser.add_argument(
        "--env-file",
        help="Path to a .env file with CPTALLOC_* settings",
    )
    parser.add_argument(
        "--verbose",
        "-v",
        action="store_true",
        help="Enable verbose output",
    )


def load_settings(parsed_args: argparse.Namespace) -> Settings:
    """Load settings and configure logging from them and the parsed flags."""
    settings = Settings.from_env(getattr(parsed_args, "env_file", None))
    setup_logging(level=settings.log_level, verbose=parsed_args.verbose)
    return settings


def output_dir(parsed_args: argparse.Namespace, settings: Settings) -> Path:
    return Path(parsed_args.output_dir) if parsed_args.output_dir else settings.output_dir


def read_json(source: str) -> Any:
    """Parse inline JSON (starting with '{' or '[') or the JSON file at ``source``.

    Raises:
        InvalidInputError: If the file is missing or does not hold valid JSON
    """
    text = source.strip()
    try:
        if text.startswith(("{", "[")):
            return json.loads(text)
        path = Path(source)
        if not path.exists():
            raise InvalidInputError(f"Input file not found: {source}")
        with open(path, encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise InvalidInputError(f"Invalid JSON in {source}: {e}") from e


def load_instance(source: str) -> NetworkInstance:
    """Load a NetworkInstance from a JSON file or inline JSON.

    Raises:
        InvalidInputError: If the data does not match the instance schema
    """
    data = read_json(source)
    try:
        instance = NetworkInstance.from_json(data)
    except ValidationError as e:
        raise InvalidInputError(f"Invalid instance: {e}") from e
    logger.debug(
        "Loaded instance: n=%d, m=%d, k=%d",
        instance.num_players,
        instance.num_links,
        instance.k,
    )
    return instance


def parse_profile(text: str) -> IntArray:
    """Parse a permutation profile written as rows '0,1;1,0' or as JSON.

    Raises:
        InvalidInputError: If the text is not a rectangular integer table
    """
    try:
        if text.strip().startswith("["):
            rows = json.loads(text)
        else:
            rows = [[int(v) for v in row.split(",")] for row in text.split(";") if row.strip()]
        profile = np.array(rows, dtype=np.int64)
    except (ValueError, json.JSONDecodeError) as e:
        raise InvalidInputError(f"Invalid permutation profile '{text}': {e}") from e
    if profile.ndim != 2:
        raise InvalidInputError(f"Permutation profile must be a table, got '{text}'")
    return profile


def parse_integers(text: str) -> list[int]:
    """Parse a comma-separated integer list such as '1,2,3'."""
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise InvalidInputError(f"Invalid integer list '{text}'") from e


def fmt(value: float) -> str:
    """Human-readable number with 6 significant digits."""
    return f"{value:.6g}"


def fmt_array(values: Any) -> str:
    return np.array2string(np.asarray(values, dtype=float), precision=6, suppress_small=True)


def report_error(error: CptAllocError) -> int:
    """Log and print a library error, returning its exit code."""
    logger.error("%s", error.message)
    print(f"Error: {error.message}")
    if isinstance(error, InvalidInstanceError):
        for violation in error.violations:
            print(f"  - {violation}")
    return error.exit_code or EXIT_INVALID_INPUT


def report_options_error(error: ValidationError) -> int:
    """Log and print an invalid option combination."""
    logger.error("Invalid options: %s", error)
    print(f"Error: invalid options: {error}")
    return EXIT_INVALID_INPUT
