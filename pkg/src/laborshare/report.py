"""Plain-text reports.

A report is a sequence of sections. Key/value sections look like::

    [metadata]
    command: fit
    seed: 0

and tabular sections embed CSV between ``[csv NAME]`` and ``[/csv]``.
Floats are written with ``repr`` so a report parses back to the exact values
it was produced from. No timestamps or timings are recorded, so re-running a
report's metadata reproduces the report byte for byte.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

HEADER = "# laborshare report v1"


def _fmt(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(_fmt(v) for v in value)
    return str(value)


@dataclass
class Table:
    columns: list[str]
    rows: list[list[Any]]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_fmt(v) for v in row])
        return buf.getvalue()


@dataclass
class Report:
    metadata: dict[str, Any] = field(default_factory=dict)
    results: dict[str, Any] = field(default_factory=dict)
    tables: dict[str, Table] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def render(self) -> str:
        out = [HEADER, "[metadata]"]
        out += [f"{k}: {_fmt(v)}" for k, v in self.metadata.items()]
        out.append("[results]")
        out += [f"{k}: {_fmt(v)}" for k, v in self.results.items()]
        for name, table in self.tables.items():
            out.append(f"[csv {name}]")
            out.append(table.to_csv().rstrip("\n"))
            out.append("[/csv]")
        out.append("[warnings]")
        out += [f"- {w}" for w in self.warnings]
        return "\n".join(out) + "\n"

    def write(self, path) -> None:
        Path(path).write_text(self.render(), encoding="utf-8")


def parse(text: str) -> Report:
    """Parse rendered text back into a ``Report``; values stay strings."""
    report = Report()
    section = None
    table_name = None
    table_lines: list[str] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if table_name is not None:
            if line == "[/csv]":
                rows = list(csv.reader(table_lines))
                report.tables[table_name] = Table(rows[0], rows[1:]) if rows else Table([], [])
                table_name, table_lines = None, []
            else:
                table_lines.append(line)
            continue
        if not line or line.startswith("#"):
            continue
        if line.startswith("[csv ") and line.endswith("]"):
            table_name = line[5:-1]
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1]
            continue
        if section == "warnings":
            report.warnings.append(line[2:] if line.startswith("- ") else line)
        elif section in ("metadata", "results"):
            key, sep, value = line.partition(": ")
            if not sep:
                raise ValueError(f"line {lineno}: expected 'key: value', got {line!r}")
            getattr(report, section)[key] = value
        else:
            raise ValueError(f"line {lineno}: content outside a section")
    if table_name is not None:
        raise ValueError(f"unterminated csv block {table_name!r}")
    return report


def read(path) -> Report:
    return parse(Path(path).read_text(encoding="utf-8"))


def csv_text(columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    return Table(list(columns), [list(r) for r in rows]).to_csv()
