"""Byte-stable CSV: 9 significant digits, ``\\n`` line endings, empty cells for absent values."""

from __future__ import annotations

import csv
import io
import math

__all__ = ["fmt_value", "write_csv", "read_csv"]


def fmt_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value) or math.isinf(value):
            raise ValueError(f"non-finite value {value!r} in table")
        text = format(value, ".9g")
        return "0" if text == "-0" else text
    return str(value)


def write_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row has {len(row)} cells, header has {len(header)}")
        w.writerow([fmt_value(v) for v in row])
    return buf.getvalue()


def read_csv(text: str) -> tuple[list[str], list[dict]]:
    """Header plus rows as dicts of strings."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        return [], []
    rows = []
    for lineno, cells in enumerate(reader, 2):
        if not cells:
            continue
        if len(cells) != len(header):
            raise ValueError(f"line {lineno}: {len(cells)} cells, header has {len(header)}")
        rows.append(dict(zip(header, cells)))
    return header, rows
