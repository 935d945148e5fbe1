"""Tests for Bridgegenus utils module."""

from pathlib import Path

from bridgegenus.partition_stats import CSV_COLUMNS, stats_rows
from bridgegenus.utils import (
    csv_to_rows,
    dumps_json,
    rows_to_csv,
    rows_to_table,
    write_output,
)


def test_dumps_json_is_stable():
    assert dumps_json({"b": 1, "a": 2}) == dumps_json({"a": 2, "b": 1})


def test_csv_roundtrip_is_byte_identical():
    text = rows_to_csv(stats_rows(10), CSV_COLUMNS)
    fieldnames, rows = csv_to_rows(text)
    assert fieldnames == list(CSV_COLUMNS)
    assert rows_to_csv(rows, fieldnames) == text
    assert "\r" not in text


def test_csv_empty_values():
    text = rows_to_csv([{"a": None, "b": 1}], ("a", "b"))
    assert text == "a,b\n,1\n"


def test_table():
    table = rows_to_table([{"n": 2, "ratio": "0.5"}], ("n", "ratio"))
    lines = table.splitlines()
    assert lines[0].split() == ["n", "ratio"]
    assert set(lines[1].replace(" ", "")) == {"-"}
    assert lines[2].split() == ["2", "0.5"]


def test_write_output_file(tmp_path: Path):
    path = tmp_path / "out" / "report.csv"
    write_output("a\n1\n", path)
    assert path.read_text() == "a\n1\n"


def test_write_output_stdout(capsys):
    write_output("hello\n", None)
    assert capsys.readouterr().out == "hello\n"
