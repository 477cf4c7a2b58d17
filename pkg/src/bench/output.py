"""CSV / JSON rendering of benchmark rows."""

import csv
import json
from dataclasses import asdict

import click

from src.bench.models import ROW_FIELDS, ComparisonRow
from src.errors import UsageError

FORMATS = ["csv", "json"]


def format_real(value: float) -> str:
    """17 significant digits: enough to reproduce the double exactly."""
    return format(value, ".17g")


def _csv_cell(value) -> str:
    if isinstance(value, float):
        return format_real(value)
    return str(value)


def render_csv(rows: list) -> str:
    lines = [",".join(ROW_FIELDS)]
    for row in rows:
        record = asdict(row)
        lines.append(",".join(_csv_cell(record[name]) for name in ROW_FIELDS))
    return "\n".join(lines) + "\n"


def render_json(rows: list) -> str:
    return json.dumps([{name: asdict(row)[name] for name in ROW_FIELDS} for row in rows], indent=2) + "\n"


def load_rows_json(text: str) -> list:
    """Inverse of render_json."""
    data = json.loads(text)
    if not isinstance(data, list):
        raise UsageError("expected a JSON list of rows")
    return [ComparisonRow(**{name: item[name] for name in ROW_FIELDS}) for item in data]


def load_rows_csv(text: str) -> list:
    reader = csv.DictReader(text.splitlines())
    if reader.fieldnames != ROW_FIELDS:
        raise UsageError(f"unexpected CSV header: {reader.fieldnames}")
    rows = []
    for item in reader:
        values = {}
        for name, kind in ComparisonRow.__annotations__.items():
            values[name] = float(item[name]) if kind is float else int(item[name]) if kind is int else item[name]
        rows.append(ComparisonRow(**values))
    return rows


def emit(rows: list, fmt: str = "csv", destination: str = "-") -> None:
    """
    Write rows to a file path, or to standard output when destination is '-'.

    Raises OSError when the destination cannot be opened.
    """
    if fmt not in FORMATS:
        raise UsageError(f"unknown format {fmt!r} (expected one of {', '.join(FORMATS)})")
    text = render_csv(rows) if fmt == "csv" else render_json(rows)
    with click.open_file(destination, "w") as out:
        out.write(text)
