"""Reader for the result-table schema emitted by the simulation CLI.

CSV: leading "# key=value" metadata comment lines, then a header row of
column names, then data rows.  JSON: {"metadata": {...}, "columns":
[{"name", "type"}, ...], "rows": [[...]]}.  Column types in the CSV case
are inferred per column (int, real, bool, string) since the CSV header
carries names only.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field


class TableError(ValueError):
    """The input file does not follow the result-table schema."""


@dataclass
class Table:
    columns: list[str]
    rows: list[list]
    metadata: dict = field(default_factory=dict)

    def column(self, name: str) -> list:
        """One column as a list; unknown names fail loudly by name."""
        if name not in self.columns:
            raise TableError(
                f"column {name!r} not found; table has {self.columns}"
            )
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]


def _parse_cell(text: str):
    if text == "true":
        return True
    if text == "false":
        return False
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def _read_csv(path: str) -> Table:
    metadata: dict = {}
    data_lines: list[str] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for line in fh:
            stripped = line.rstrip("\n")
            if stripped.startswith("# ") and not data_lines:
                key, sep, value = stripped[2:].partition("=")
                if not sep:
                    raise TableError(f"malformed metadata line {stripped!r}")
                metadata[key] = _parse_cell(value)
            elif stripped:
                data_lines.append(stripped)
    if not data_lines:
        raise TableError(f"{path} has no header row")
    reader = csv.reader(data_lines)
    header = next(reader)
    rows = [[_parse_cell(cell) for cell in row] for row in reader]
    for row in rows:
        if len(row) != len(header):
            raise TableError(f"row width {len(row)} != column count {len(header)}")
    return Table(columns=header, rows=rows, metadata=metadata)


def _read_json(path: str) -> Table:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    try:
        columns = [c["name"] for c in data["columns"]]
        raw_rows = data["rows"]
        metadata = data["metadata"]
    except (KeyError, TypeError) as exc:
        raise TableError(f"{path} is not a result table: {exc}") from exc
    rows = [
        [math.nan if cell is None else cell for cell in row] for row in raw_rows
    ]
    return Table(columns=columns, rows=rows, metadata=metadata)


def read_table(path: str) -> Table:
    """Load a result table, dispatching on the file extension."""
    if path.endswith(".json"):
        return _read_json(path)
    if path.endswith(".csv"):
        return _read_csv(path)
    raise TableError(f"unsupported table format: {path} (expected .csv or .json)")
