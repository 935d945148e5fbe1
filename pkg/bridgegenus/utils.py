"""Report I/O helpers: JSON records, CSV and plain-text tables."""

from __future__ import annotations

import csv
import io
import json
from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path
from typing import Any

import click
from loguru import logger

CSV_LINE_TERMINATOR = "\n"


def dumps_json(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=True, default=str) + "\n"


def rows_to_csv(rows: Iterable[Mapping[str, Any]], columns: Sequence[str]) -> str:
    """CSV text with a fixed column order and '\\n' line endings.

    Values must already be strings (or str()-stable); parsing the output
    with ``csv_to_rows`` and emitting again gives identical bytes.
    """
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator=CSV_LINE_TERMINATOR)
    writer.writeheader()
    for row in rows:
        writer.writerow({c: "" if row.get(c) is None else str(row[c]) for c in columns})
    return buf.getvalue()


def csv_to_rows(text: str) -> tuple[list[str], list[dict[str, str]]]:
    reader = csv.DictReader(io.StringIO(text))
    rows = list(reader)
    return list(reader.fieldnames or []), rows


def rows_to_table(rows: Sequence[Mapping[str, Any]], columns: Sequence[str]) -> str:
    """Left-aligned fixed-width table for terminals."""
    cells = [[str(c) for c in columns]]
    cells.extend([["" if r.get(c) is None else str(r[c]) for c in columns] for r in rows])
    widths = [max(len(line[i]) for line in cells) for i in range(len(columns))]
    lines = ["  ".join(v.ljust(w) for v, w in zip(line, widths)).rstrip() for line in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def write_output(text: str, out: str | Path | None) -> None:
    """Write to a file (creating directories) or stdout."""
    if out is None:
        click.echo(text, nl=False)
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info("Report written: path={}, bytes={}", path, len(text))
