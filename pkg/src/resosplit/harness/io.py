"""CSV and JSON emitters with a fixed schema and deterministic formatting."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Mapping

from .runner import CSV_COLUMNS, TrajectoryRecord


def format_float(x: float | None) -> str:
    """17 significant digits, so values round-trip exactly; None becomes empty."""
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    return f"{x:.17g}"


def emit_csv(records: Iterable[TrajectoryRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in records:
            w.writerow([r.n] + [format_float(getattr(r, c)) for c in CSV_COLUMNS[1:]])


def read_csv(path: str | Path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def emit_json(summary: Mapping, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def emit_table(rows: list[Mapping], path: str | Path) -> None:
    """Write a list of flat dicts (e.g. sweep rows) as CSV."""
    if not rows:
        Path(path).write_text("")
        return
    cols = list(rows[0])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for row in rows:
            w.writerow(
                [format_float(v) if isinstance(v, float) or v is None else v for v in (row[c] for c in cols)]
            )
