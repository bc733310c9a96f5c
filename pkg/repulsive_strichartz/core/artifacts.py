"""Byte-stable CSV and JSON writers shared by every command."""

import csv
import io
import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np


def format_float(value: float) -> str:
    """17 significant digits, dot decimal, ``inf`` for infinity."""
    value = float(value)
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return "%.17g" % value


def format_cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating, Fraction)):
        return format_float(float(value))
    return str(value)


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows([format_cell(cell) for cell in row] for row in rows)
    return buffer.getvalue()


def to_jsonable(value: Any) -> Any:
    """Plain JSON values; non-finite floats and Fractions become strings."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isfinite(value):
            return value
        return "nan" if math.isnan(value) else format_float(value)
    if isinstance(value, Path):
        return value.as_posix()
    return value


def json_text(data: Any) -> str:
    """Sorted keys, two-space indent; floats in their shortest round-trip form."""
    return json.dumps(to_jsonable(data), sort_keys=True, indent=2, ensure_ascii=False) + "\n"
