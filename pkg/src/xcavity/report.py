"""Delimited text output: gnuplot-ready tables and JSON lines with a config header."""
from __future__ import annotations

import json
import math
from typing import IO, Iterable, Mapping, Sequence

import numpy as np

COMMENT = "# "


def fmt(v) -> str:
    """17 significant digits, round-trip safe; complex values are not accepted."""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.17g}"


def _jsonable(obj):
    if isinstance(obj, Mapping):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, separators=(",", ":"))


def write_header(out: IO[str], command: str, config: Mapping) -> None:
    out.write(f"{COMMENT}xcavity {command}\n")
    out.write(f"{COMMENT}config {dumps(config)}\n")


def write_table(out: IO[str], columns: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Comma-separated table with a commented column line (gnuplot: set datafile separator ',')."""
    out.write(COMMENT + ",".join(columns) + "\n")
    for row in rows:
        out.write(",".join(fmt(v) for v in row) + "\n")


def write_footer(out: IO[str], summary: Mapping) -> None:
    for k, v in summary.items():
        out.write(f"{COMMENT}{k} = {fmt(v) if not isinstance(v, (list, dict, tuple)) else dumps(v)}\n")


def write_jsonl(out: IO[str], records: Iterable) -> None:
    for r in records:
        out.write(dumps(r) + "\n")


def read_table(path) -> tuple[list[str], np.ndarray]:
    """Columns and data of a table written by `write_table` (header and footer skipped)."""
    columns: list[str] = []
    rows = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if line.startswith(COMMENT):
                body = line[len(COMMENT):].strip()
                if not columns and "," in body and "=" not in body and not body.startswith("config"):
                    columns = body.split(",")
                continue
            if line.strip():
                rows.append([float(x) for x in line.split(",")])
    return columns, np.array(rows)
