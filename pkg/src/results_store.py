#!/usr/bin/env python3
"""
On-disk campaign artifacts: trials.csv, summary.json and front_<trial>.json.

Payloads carry no timestamps; the only run metadata is the ``meta`` block.
"""

import csv
import io
import math
import os
from typing import Any, Dict, Iterable, List, Optional

from src.logging_utils import get_logger
from src.utils import dump_json, make_dirs, write_text

logger = get_logger(__name__)

CSV_FLOAT_FORMAT = ".17g"


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, CSV_FLOAT_FORMAT) if math.isfinite(value) else str(value)
    return str(value)


class ResultStore:
    """
    Writes the artifacts of one campaign setting into a directory.
    """

    def __init__(self, out_dir: str):
        """
        Initialize the store, creating out_dir if needed.

        Args:
            out_dir: Output directory
        """
        self.out_dir = out_dir
        make_dirs(out_dir)

    def path(self, name: str) -> str:
        return os.path.join(self.out_dir, name)

    def subdir(self, label: str) -> "ResultStore":
        """Store for one sweep setting."""
        return ResultStore(self.path(label)) if label else self

    def write_trials(self, rows: List[Dict[str, Any]], columns: Optional[Iterable[str]] = None) -> str:
        """
        Write per-trial rows as CSV with 17-significant-digit floats.

        Columns default to the keys of the first row, in order.

        Returns:
            Path of the CSV file
        """
        target = self.path("trials.csv")
        if columns is None:
            columns = list(rows[0].keys()) if rows else []
        columns = list(columns)
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_csv_cell(row.get(col)) for col in columns])
        write_text(target, buffer.getvalue())
        logger.debug(f"Wrote {len(rows)} rows to {target}")
        return target

    def write_summary(self, summary: Dict[str, Any], meta: Dict[str, Any]) -> str:
        """Write summary.json with the meta block first."""
        target = self.path("summary.json")
        write_text(target, dump_json({"meta": meta, **summary}) + "\n")
        logger.debug(f"Wrote {target}")
        return target

    def write_front(self, trial: int, fronts: Dict[str, Any]) -> str:
        """Write front_<trial>.json."""
        target = self.path(f"front_{trial}.json")
        write_text(target, dump_json(fronts) + "\n")
        return target
