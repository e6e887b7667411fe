"""Numeric table output in CSV and JSON with exact float round-tripping.

Every float is written with 17 significant digits, so reading a file back and
writing it again reproduces it byte for byte.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Any

import numpy as np


def format_float(x: float) -> str:
    return format(float(x) + 0.0, ".17g")  # + 0.0 folds -0.0 into 0.0


def _json_value(v: Any) -> str:
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "null" if not math.isfinite(v) else format_float(v)
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json_value(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_json_value(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def to_csv(columns: list[str], rows) -> str:
    lines = [",".join(columns)]
    lines.extend(",".join(format_float(x) for x in row) for row in rows)
    return "\n".join(lines) + "\n"


def to_json(columns: list[str], rows, meta: dict | None = None) -> str:
    body = ",\n".join("  " + _json_value(list(row)) for row in rows)
    return (
        "{\n"
        f'"meta": {_json_value(meta or {})},\n'
        f'"columns": {_json_value(list(columns))},\n'
        f'"rows": [\n{body}\n]\n'
        "}\n"
    )


def render(fmt: str, columns: list[str], rows, meta: dict | None = None) -> str:
    if fmt == "csv":
        return to_csv(columns, rows)
    if fmt == "json":
        return to_json(columns, rows, meta)
    raise ValueError(f"unknown format {fmt!r}")


def parse_csv(text: str) -> tuple[list[str], list[list[float]]]:
    reader = csv.reader(io.StringIO(text))
    columns = next(reader)
    return columns, [[float(x) for x in row] for row in reader if row]


def parse_json(text: str) -> tuple[list[str], list[list[float]], dict]:
    doc = json.loads(text)
    rows = [[math.nan if x is None else float(x) for x in row] for row in doc["rows"]]
    return doc["columns"], rows, doc["meta"]


def reemit(text: str, fmt: str) -> str:
    """Parse ``text`` and serialize it again in the same format."""
    if fmt == "csv":
        return to_csv(*parse_csv(text))
    doc = json.loads(text)
    rows = [[math.nan if x is None else float(x) for x in row] for row in doc["rows"]]
    return to_json(doc["columns"], rows, doc["meta"])
