"""Delimited output and run manifests for experiment tables.

Every experiment returns a :class:`Table`; writers here are the single
path from tables to disk so formatting stays uniform: comma-separated,
'.' decimal point, floats at full round-trip precision (%.17g), "\n" line
ends regardless of platform, empty cell for missing values.  Each CSV gets
a JSON manifest sidecar recording the experiment name, column names and
the full configuration that produced it, so any file can be regenerated.
"""

from __future__ import annotations

import csv
import io
import json
import numbers
import os
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

__all__ = [
    "Table",
    "figure_path_for",
    "manifest_path_for",
    "to_csv_text",
    "write_csv",
    "write_manifest",
]


@dataclass
class Table:
    """Column-named experiment output: a name, column labels and rows."""

    name: str
    columns: list[str]
    rows: list[list[Any]] = field(default_factory=list)

    def append(self, *values: Any) -> None:
        if len(values) != len(self.columns):
            raise ValueError(
                f"row has {len(values)} cells, table has {len(self.columns)} columns"
            )
        self.rows.append(list(values))


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, numbers.Integral):
        return str(int(v))
    if isinstance(v, numbers.Real):
        return f"{float(v):.17g}"
    raise TypeError(f"cannot format cell of type {type(v).__name__}")


def to_csv_text(table: Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def write_csv(table: Table, path: str) -> str:
    with open(path, "w", newline="") as fh:
        fh.write(to_csv_text(table))
    return path


def manifest_path_for(csv_path: str) -> str:
    root, _ = os.path.splitext(csv_path)
    return root + ".manifest.json"


def figure_path_for(csv_path: str) -> str:
    root, _ = os.path.splitext(csv_path)
    return root + ".png"


def write_manifest(table: Table, csv_path: str, config: Mapping[str, Any]) -> str:
    payload = {
        "experiment": table.name,
        "columns": list(table.columns),
        "config": dict(config),
    }
    path = manifest_path_for(csv_path)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
