"""Tests for Bridgegenus command-line interface."""

import json
import sys
from fractions import Fraction

import pytest
from click.testing import CliRunner
from loguru import logger

from bridgegenus.cli import EXIT_INVARIANT, EXIT_RESOURCE, EXIT_VALIDATION, cli, main
from bridgegenus.cobordism_engine import g4_upper_bound
from bridgegenus.config import get_settings
from bridgegenus.models import BoundParams, TwistWord
from bridgegenus.trace_io import trace_to_text
from bridgegenus.utils import csv_to_rows
import bridgegenus.partition_stats as stats_module


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture(autouse=True)
def _fresh_settings(monkeypatch):
    monkeypatch.delenv("BRIDGEGENUS_WORKERS", raising=False)
    monkeypatch.delenv("BRIDGEGENUS_ENUMERATION_CAP", raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()
    # sinks added by the commands point at the runner's closed streams
    logger.remove()


class TestExact:
    def test_lemma_table(self, runner):
        result = runner.invoke(cli, ["exact", "--n-max", "12", "--format", "csv"])
        assert result.exit_code == 0, result.output
        _, rows = csv_to_rows(result.output)
        assert len(rows) == 11
        for row in rows:
            ratio = Fraction(int(row["avg_genus_num"]), int(row["avg_genus_den"])) / int(row["n"])
            assert ratio >= Fraction(1, 4)

    def test_single_row(self, runner):
        result = runner.invoke(cli, ["exact", "--n-max", "2", "--format", "csv"])
        _, rows = csv_to_rows(result.output)
        assert len(rows) == 1
        assert rows[0]["ratio_decimal"] == "0.500000000000"

    def test_unsigned(self, runner):
        result = runner.invoke(cli, ["exact", "--n-max", "10", "--unsigned", "--format", "csv"])
        _, rows = csv_to_rows(result.output)
        for row in rows[1:]:
            n = int(row["n"])
            assert Fraction(int(row["avg_genus_num"]), int(row["avg_genus_den"])) == Fraction(n + 1, 4)

    def test_invalid_n_max(self, runner):
        result = runner.invoke(cli, ["exact", "--n-max", "1"])
        assert result.exit_code == EXIT_VALIDATION

    def test_knots_over_cap(self, runner, monkeypatch):
        monkeypatch.setenv("BRIDGEGENUS_ENUMERATION_CAP", "5")
        result = runner.invoke(cli, ["exact", "--n-max", "6", "--knots", "--format", "csv"])
        assert result.exit_code == EXIT_RESOURCE
        assert "cap 5" in result.output

    def test_json(self, runner):
        result = runner.invoke(cli, ["exact", "--n-max", "4", "--format", "json"])
        record = json.loads(result.output)
        assert record["run"]["command"] == "exact"
        assert len(record["rows"]) == 3
        assert record["notes"]["quarter_bound"] == "ok"
        assert Fraction(record["notes"]["min_ratio"]) >= Fraction(1, 4)

    def test_table_reports_min_ratio(self, runner):
        result = runner.invoke(cli, ["exact", "--n-max", "6", "--format", "table"])
        header = result.output.splitlines()[0]
        assert "quarter_bound=ok" in header
        assert "min_ratio=" in header
        assert "argmin_n=" in header

    def test_quarter_bound_violation(self, runner, monkeypatch):
        real = stats_module.avg_genus_exact

        def low_at_five(n, signed=True, mode="words", cap=None):
            stat = real(n, signed, mode, cap)
            return stat.model_copy(update={"value": Fraction(1)}) if n == 5 else stat

        monkeypatch.setattr(stats_module, "avg_genus_exact", low_at_five)
        result = runner.invoke(cli, ["exact", "--n-max", "6", "--format", "csv"])
        assert result.exit_code == EXIT_INVARIANT
        assert "n=5" in result.output


class TestBound:
    def test_five_pairs(self, runner):
        result = runner.invoke(cli, ["bound", "--word", "1,1,1,1,-1,-1,1,1,1,1", "--k", "2", "--s", "1", "--format", "table"])
        assert result.exit_code == 0, result.output
        assert "bound=3" in result.output
        assert "n=10 m=5" in result.output

    def test_genus_cap(self, runner):
        result = runner.invoke(cli, ["bound", "--word", "1,1", "--k", "32", "--s", "2", "--format", "table"])
        assert "bound=1" in result.output

    def test_csv_row(self, runner):
        result = runner.invoke(cli, ["bound", "--word", "1,-1,2,-1", "--format", "csv"])
        _, rows = csv_to_rows(result.output)
        assert rows[0]["crossing_low"] == "6"
        assert rows[0]["crossing_high"] == "10"
        assert rows[0]["writhe"] == "10"
        assert rows[0]["alternating"] == "false"
        assert rows[0]["summands"] == "1"
        assert float(rows[0]["typical_summands_low"]) == pytest.approx(5 / 48)
        assert float(rows[0]["typical_summands_high"]) == pytest.approx(5 / 6)

    def test_csv_row_counts_summands(self, runner):
        result = runner.invoke(cli, ["bound", "--word", "1,1,1,1,-1,-1,1,1,1,1", "--k", "2", "--s", "1", "--format", "csv"])
        _, rows = csv_to_rows(result.output)
        assert rows[0]["summands"] == "3"
        assert rows[0]["alternating"] == "false"
        assert rows[0]["writhe"] == "0"

    def test_zero_entry(self, runner):
        result = runner.invoke(cli, ["bound", "--word", "1,0,1,1"])
        assert result.exit_code == EXIT_VALIDATION
        assert '"0"' in result.output
        assert "position 2" in result.output

    def test_trace_text(self, runner):
        result = runner.invoke(cli, ["bound", "--word", "1,1,1,1,-1,-1,1,1,1,1", "--k", "2", "--s", "1", "--trace", "--format", "table"])
        assert "trace 1" in result.output
        assert "step cancel_mirror_pair cost=0" in result.output

    def test_trace_json(self, runner):
        result = runner.invoke(cli, ["bound", "--word", "1,1", "--trace", "--format", "json"])
        record = json.loads(result.output)
        assert record["trace"]["header"]["bound"] == 1

    def test_replay_ok(self, runner, tmp_path):
        _, trace = g4_upper_bound(TwistWord.of(1, 1, 1, 1, -1, -1, 1, 1, 1, 1), BoundParams(k=2, s=1))
        path = tmp_path / "trace.txt"
        path.write_text(trace_to_text(trace))
        result = runner.invoke(cli, ["bound", "--replay", str(path)])
        assert result.exit_code == 0
        assert "replay ok" in result.output

    def test_replay_tampered(self, runner, tmp_path):
        _, trace = g4_upper_bound(TwistWord.of(1, 1, 1, 1, -1, -1, 1, 1, 1, 1), BoundParams(k=2, s=1))
        text = trace_to_text(trace).replace("step split cost=1 pair=4", "step split cost=1 pair=3")
        path = tmp_path / "trace.txt"
        path.write_text(text)
        result = runner.invoke(cli, ["bound", "--replay", str(path)])
        assert result.exit_code == EXIT_INVARIANT

    def test_replay_malformed(self, runner, tmp_path):
        path = tmp_path / "trace.txt"
        path.write_text("garbage\n")
        result = runner.invoke(cli, ["bound", "--replay", str(path)])
        assert result.exit_code == EXIT_VALIDATION


class TestSweep:
    ARGS = ["sweep", "--n-grid", "20,60", "--k", "2", "--k", "3", "--s", "1", "--samples", "128", "--seed", "7", "--format", "csv"]

    def test_columns_and_cap(self, runner):
        result = runner.invoke(cli, self.ARGS + ["--workers", "1"])
        assert result.exit_code == 0, result.output
        fieldnames, rows = csv_to_rows(result.output)
        assert fieldnames == [
            "n", "avg_ratio", "se_ratio", "avg_bound_over_n",
            "eight_avg_bound_over_n", "tail_fraction", "best_params",
        ]
        assert [r["n"] for r in rows] == ["20", "60"]
        assert all(float(r["avg_ratio"]) <= 1 for r in rows)

    def test_deterministic_across_workers(self, runner):
        one = runner.invoke(cli, self.ARGS + ["--workers", "1"])
        two = runner.invoke(cli, self.ARGS + ["--workers", "2"])
        assert one.exit_code == two.exit_code == 0
        assert one.output == two.output

    def test_out_file(self, runner, tmp_path):
        out = tmp_path / "sweep.csv"
        result = runner.invoke(cli, self.ARGS + ["--workers", "1", "--out", str(out)])
        assert result.exit_code == 0
        assert out.read_text().startswith("n,avg_ratio")

    def test_bad_grid(self, runner):
        result = runner.invoke(cli, ["sweep", "--n-grid", "100,10"])
        assert result.exit_code == EXIT_VALIDATION

    def test_non_integer_grid(self, runner):
        result = runner.invoke(cli, ["sweep", "--n-grid", "10,abc"])
        assert result.exit_code == EXIT_VALIDATION
        assert "abc" in result.output

    def test_env_workers_echoed(self, runner, monkeypatch):
        monkeypatch.setenv("BRIDGEGENUS_WORKERS", "1")
        args = [a if a != "csv" else "table" for a in self.ARGS]
        result = runner.invoke(cli, args)
        assert "workers=1 (env)" in result.output

    def test_json_matches_across_workers(self, runner):
        args = [a if a != "csv" else "json" for a in self.ARGS]
        one = runner.invoke(cli, args + ["--workers", "1"])
        two = runner.invoke(cli, args + ["--workers", "2"])
        assert one.exit_code == two.exit_code == 0
        assert one.output == two.output
        assert "worker_count" not in json.loads(one.output)["run"]

    def test_time_budget_hit(self, runner):
        result = runner.invoke(cli, self.ARGS + ["--workers", "1", "--time-budget", "1e-9"])
        assert result.exit_code == EXIT_RESOURCE
        assert "Resource cap: time budget hit: n=20" in result.output

    def test_negative_time_budget(self, runner):
        result = runner.invoke(cli, self.ARGS + ["--time-budget", "-1"])
        assert isinstance(result.exception, SystemExit)
        assert result.exit_code != 0
        assert "--time-budget" in result.output

    def test_main_maps_usage_errors(self, monkeypatch):
        monkeypatch.setattr(sys, "argv", ["bridgegenus", "sweep", "--time-budget", "-1"])
        with pytest.raises(SystemExit) as exc:
            main()
        assert exc.value.code == EXIT_VALIDATION


class TestWalk:
    def test_report(self, runner):
        result = runner.invoke(cli, ["walk", "--t", "400", "--trials", "5", "--seed", "1", "--format", "csv"])
        assert result.exit_code == 0, result.output
        _, rows = csv_to_rows(result.output)
        assert rows[0]["expected_scale"] == "10"

    def test_single_trial_flags_error(self, runner):
        result = runner.invoke(cli, ["walk", "--t", "100", "--trials", "1", "--format", "csv"])
        _, rows = csv_to_rows(result.output)
        assert rows[0]["se_discrepancy"] == "undefined"

    def test_single_summand(self, runner):
        result = runner.invoke(cli, ["walk", "--t", "1", "--trials", "10", "--format", "csv"])
        _, rows = csv_to_rows(result.output)
        assert float(rows[0]["mean_discrepancy"]) <= 1


class TestEnumerate:
    def test_words(self, runner):
        result = runner.invoke(cli, ["enumerate", "--n", "2"])
        assert result.exit_code == 0
        assert sorted(result.output.split()) == ["-1,-1", "-1,1", "1,-1", "1,1"]

    def test_knots(self, runner):
        result = runner.invoke(cli, ["enumerate", "--n", "2", "--knots"])
        assert sorted(result.output.split()) == ["-1,-1", "-1,1", "1,-1"]

    def test_cap(self, runner):
        result = runner.invoke(cli, ["enumerate", "--n", "40"])
        assert result.exit_code == EXIT_RESOURCE
        assert "cap" in result.output
