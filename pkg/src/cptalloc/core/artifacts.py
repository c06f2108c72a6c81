"""JSON and CSV result files."""

import csv
import json
import logging
from collections.abc import Iterable, Sequence
from datetime import datetime
from pathlib import Path
from typing import Any

from cptalloc import __version__

logger = logging.getLogger(__name__)


class ArtifactWriter:
    """Writes command reports and tables under one output directory.

    JSON files wrap the report with metadata so a result can be traced
    back to the command that produced it.

    Usage:
        writer = ArtifactWriter("./results", command="solve-fix")
        writer.write_json("solve_fix.json", report.to_dict())
        writer.write_csv("trace.csv", ["iteration", "value"], rows)
    """

    def __init__(self, output_dir: str | Path, command: str = ""):
        """Initialize the writer.

        Args:
            output_dir: Directory receiving the files, created on first write
            command: Subcommand name recorded in JSON metadata
        """
        self.output_dir = Path(output_dir)
        self.command = command

    def _path(self, name: str) -> Path:
        self.output_dir.mkdir(parents=True, exist_ok=True)
        return self.output_dir / name

    def write_json(self, name: str, report: dict[str, Any]) -> Path:
        """Write a report with metadata and return its path."""
        path = self._path(name)
        data = {
            "metadata": {
                "created": datetime.now().isoformat(),
                "command": self.command,
                "version": __version__,
            },
            "report": report,
        }
        with open(path, "w", encoding="utf-8") as f:
            json.dump(data, f, indent=2)
        logger.info("Wrote %s", path)
        return path

    def write_csv(
        self,
        name: str,
        header: Sequence[str],
        rows: Iterable[Sequence[Any]],
    ) -> Path:
        """Write a table with a header row and return its path."""
        path = self._path(name)
        count = 0
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(header)
            for row in rows:
                writer.writerow(row)
                count += 1
        logger.info("Wrote %d rows to %s", count, path)
        return path

    @staticmethod
    def load_json(path: str | Path) -> dict[str, Any]:
        """Read back the report part of a JSON artifact."""
        with open(path, encoding="utf-8") as f:
            data: dict[str, Any] = json.load(f)
        report: dict[str, Any] = data.get("report", {})
        return report
