#!/usr/bin/env python3
"""
Utility functions for ring-chord: terminal tables, progress bars and JSON I/O.
"""

import json
import math
import os
import sys
from typing import Any, Dict, List, Optional, TextIO

import numpy as np
import wcwidth
from tqdm import tqdm

from src.exceptions import InputError
from src.logging_utils import get_logger

logger = get_logger(__name__)


def format_time(seconds: float) -> str:
    """
    Format seconds into a human-readable time string.

    Args:
        seconds: Number of seconds

    Returns:
        Human-readable time string
    """
    hours, remainder = divmod(int(seconds), 3600)
    minutes, seconds = divmod(remainder, 60)

    if hours > 0:
        return f"{hours}h {minutes}m {seconds}s"
    elif minutes > 0:
        return f"{minutes}m {seconds}s"
    else:
        return f"{seconds}s"


def format_float(value: Optional[float], digits: int = 4) -> str:
    """Fixed-point for moderate magnitudes, scientific otherwise; '-' for missing values."""
    if value is None:
        return "-"
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, (int, np.integer)):
        return str(value)
    if not math.isfinite(value):
        return str(value)
    if value != 0 and (abs(value) < 10 ** (-digits) or abs(value) >= 1e6):
        return f"{value:.{digits - 1}e}"
    return f"{value:.{digits}f}"


def format_mean_sd(stats: Dict[str, Any], digits: int = 4) -> str:
    """'mean ± sd' from a describe() block."""
    if not stats or stats.get("mean") is None:
        return "-"
    return f"{format_float(stats['mean'], digits)} ± {format_float(stats['sd'], digits)}"


def get_visual_width(text) -> int:
    """
    Calculate the visual width of text, considering combining marks and wide characters.

    Args:
        text: The string to calculate visual width for

    Returns:
        int: The visual width of the text
    """
    width = wcwidth.wcswidth(str(text))
    return width if width >= 0 else len(str(text))


def pad_string(text, width, align="left") -> str:
    """
    Pad a string to the given visual width.

    Args:
        text: The string to pad
        width: The desired visual width
        align: Alignment ('left', 'right', 'center')

    Returns:
        str: The padded string
    """
    text_str = str(text)
    padding_needed = max(0, width - get_visual_width(text_str))

    if align == "right":
        return " " * padding_needed + text_str
    elif align == "center":
        left_padding = padding_needed // 2
        return " " * left_padding + text_str + " " * (padding_needed - left_padding)
    else:
        return text_str + " " * padding_needed


def print_dynamic_table(
    data: List[Dict[str, Any]], headers: Dict[str, str], stream: Optional[TextIO] = None
) -> None:
    """
    Print a table sized to its content. Headers such as 'θ̂' or 'ε⁺' are measured
    by visual width, so columns stay aligned.

    Args:
        data: List of dictionaries containing the data to print
        headers: Dictionary mapping column keys to header names
        stream: Output stream (stdout by default)
    """
    out = stream or sys.stdout
    col_widths = {col: get_visual_width(header) + 2 for col, header in headers.items()}
    for row in data:
        for col in headers:
            col_widths[col] = max(col_widths[col], get_visual_width(row.get(col, "")) + 2)

    total_width = sum(col_widths.values()) + len(headers) - 1

    print(f"\n{'=' * total_width}", file=out)
    print(" ".join(pad_string(headers[col], col_widths[col]) for col in headers), file=out)
    print("-" * total_width, file=out)
    for row in data:
        print(" ".join(pad_string(row.get(col, ""), col_widths[col]) for col in headers), file=out)
    print(f"{'=' * total_width}\n", file=out)


def create_progress_bar(total: int, desc: str = "", disable: bool = False) -> tqdm:
    """
    Create a trial progress bar on stderr.

    Args:
        total: Number of trials
        desc: Description for the progress bar
        disable: Suppress the bar entirely

    Returns:
        A tqdm progress bar
    """
    return tqdm(
        total=total,
        unit="trial",
        desc=desc,
        file=sys.stderr,
        disable=disable,
        bar_format="{desc}: {percentage:3.0f}%|{bar}| {n_fmt}/{total_fmt} [{elapsed}<{remaining}]",
    )


def json_safe(obj: Any) -> Any:
    """
    Convert numpy scalars/arrays and tuples to plain JSON types; non-finite floats become None.
    """
    if isinstance(obj, dict):
        return {str(key): json_safe(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_safe(value) for value in obj]
    if isinstance(obj, np.ndarray):
        return [json_safe(value) for value in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else None
    return obj


def dump_json(payload: Any) -> str:
    """Serialize a payload with shortest round-trip floats and stable key order."""
    return json.dumps(json_safe(payload), indent=2, allow_nan=False)


def load_json(path: str) -> Any:
    """
    Read a JSON file.

    Args:
        path: File path ('-' reads stdin)

    Returns:
        The decoded document

    Raises:
        InputError: If the file is missing or malformed (with line and column)
    """
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, "r", encoding="utf-8") as f:
                text = f.read()
    except OSError as e:
        raise InputError(f"Cannot read {path}: {e.strerror or e}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"Malformed JSON in {path} at line {e.lineno}, column {e.colno}: {e.msg}") from e


def make_dirs(path: str) -> None:
    """
    Create a directory and its parents.

    Raises:
        InputError: If the directory cannot be created
    """
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as e:
        raise InputError(f"Cannot create directory {path}: {e.strerror or e}") from e


def write_text(path: str, text: str) -> None:
    """
    Write a text file, replacing any previous content.

    Raises:
        InputError: If the file cannot be written
    """
    try:
        with open(path, "w", newline="", encoding="utf-8") as f:
            f.write(text)
    except OSError as e:
        raise InputError(f"Cannot write {path}: {e.strerror or e}") from e


def write_output(payload: Any, out_path: Optional[str] = None) -> None:
    """
    Write a JSON payload to out_path, or to stdout when no path is given.

    Raises:
        InputError: If out_path cannot be written
    """
    text = dump_json(payload)
    if out_path:
        write_text(out_path, text + "\n")
        logger.info(f"Wrote {out_path}")
    else:
        print(text)
