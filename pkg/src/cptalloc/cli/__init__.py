"""Command-line interface for cptalloc."""

from cptalloc.cli.main import main

__all__ = ["main"]
