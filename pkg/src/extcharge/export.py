"""Tabular results with a per-row status, written as CSV or JSON.

Floats are written with 17 significant digits, so output is reproducible
byte for byte.  A row that could not be computed keeps its place in the
table, carries an explanatory status and leaves its numeric cells empty.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

__all__ = ["OK", "ResultTable", "format_value", "to_csv", "to_json", "render"]

OK = "ok"


@dataclass
class ResultTable:
    columns: tuple[str, ...]
    rows: list = field(default_factory=list)
    status: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add(self, values: Sequence, status: str = OK) -> None:
        """Append a row; non-finite numbers demote it to a failed row."""
        values = list(values)
        if len(values) != len(self.columns):
            raise ValueError(f"expected {len(self.columns)} values, got {len(values)}")
        bad = [c for c, v in zip(self.columns, values) if isinstance(v, float) and not math.isfinite(v)]
        if bad:
            values = [None if isinstance(v, float) and not math.isfinite(v) else v for v in values]
            status = "non-finite result in " + ",".join(bad)
        self.rows.append(values)
        self.status.append(status)

    def fail(self, leading: Sequence, status: str) -> None:
        """Append a failed row that keeps only its ``leading`` (input) values."""
        leading = list(leading)
        self.rows.append(leading + [None] * (len(self.columns) - len(leading)))
        self.status.append(status)

    @property
    def ok(self) -> bool:
        return all(s.startswith(OK) for s in self.status)

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return f"{v:.16e}"
    return str(v)


def to_csv(table: ResultTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(table.columns) + ["status"])
    for row, status in zip(table.rows, table.status):
        writer.writerow([format_value(v) for v in row] + [status])
    return buf.getvalue()


def to_json(table: ResultTable) -> str:
    """One JSON object with ``columns``, ``rows`` (one object per row) and ``meta``."""
    rows = []
    for row, status in zip(table.rows, table.status):
        item = dict(zip(table.columns, row))
        item["status"] = status
        rows.append(item)
    doc = {"columns": list(table.columns), "rows": rows, "meta": table.meta}
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def render(table: ResultTable, fmt: str) -> str:
    if fmt == "csv":
        return to_csv(table)
    if fmt == "json":
        return to_json(table)
    raise ValueError(f"unknown format {fmt!r}")
