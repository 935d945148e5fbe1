"""Command-line front end for Bridgegenus.

Words are given as half-parameters: ``--word 1,-1,2,-1`` is the knot
K(2, -2, 4, -2).

Exit codes: 0 success, 1 validation error, 2 resource cap or partial
result, 3 internal invariant violation.
"""

from __future__ import annotations

import sys
from pathlib import Path
from typing import Any

import click
from loguru import logger

from bridgegenus import __version__
from bridgegenus.cobordism_engine import chunk_count_bounds, default_grid, g4_upper_bound_best, replay
from bridgegenus.config import get_settings
from bridgegenus.errors import (
    EnumerationCapError,
    InvariantViolation,
    ResourceCapError,
    TraceFormatError,
    WordParseError,
)
from bridgegenus.knot_core import (
    canonical_entries,
    crossing_bounds,
    format_word,
    is_alternating_diagram,
    parse_word,
    writhe,
)
from bridgegenus.models import RunConfig, SamplerConfig, WalkExperimentConfig
from bridgegenus.montecarlo import require_complete, theorem1_report, walk_experiment
from bridgegenus.partition_stats import (
    CSV_COLUMNS as EXACT_CSV_COLUMNS,
    enumerate_words,
    lemma1_check,
    stats_rows,
)
from bridgegenus.trace_io import (
    trace_from_json,
    trace_from_text,
    trace_to_json,
    trace_to_record,
    trace_to_text,
)
from bridgegenus.utils import dumps_json, rows_to_csv, rows_to_table, write_output

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RESOURCE = 2
EXIT_INVARIANT = 3

SWEEP_COLUMNS = (
    "n", "avg_ratio", "se_ratio", "avg_bound_over_n",
    "eight_avg_bound_over_n", "tail_fraction", "best_params",
)
WALK_COLUMNS = (
    "k", "s", "t", "trials", "mean_discrepancy", "se_discrepancy",
    "expected_scale", "normalized_ratio", "se_ratio", "self_mirror_excess",
)


def _configure_logging(verbose: bool) -> None:
    logger.remove()
    logger.add(sys.stderr, level="DEBUG" if verbose else get_settings().log_level)


def _resolve_format(fmt: str | None) -> str:
    if fmt:
        return fmt
    return "table" if sys.stdout.isatty() else "csv"


def _num(x: float | None) -> str:
    return "" if x is None else format(x, ".12g")


def _int_list(text: str, name: str) -> tuple[int, ...]:
    try:
        values = tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got {text!r}", param_hint=name)
    if not values:
        raise click.BadParameter("empty list", param_hint=name)
    return values


def _emit(
    rows: list[dict[str, Any]],
    columns: tuple[str, ...],
    fmt: str,
    out: str | None,
    run: RunConfig,
    notes: dict[str, Any] | None = None,
) -> None:
    """CSV carries rows only; json and table also carry the run and any notes.

    Worker count is kept out of json so reports match across worker counts.
    """
    if fmt == "csv":
        text = rows_to_csv(rows, columns)
    elif fmt == "json":
        record: dict[str, Any] = {
            "run": run.model_dump(mode="json", exclude={"worker_count", "workers_from_env"}),
            "rows": rows,
        }
        if notes:
            record["notes"] = notes
        text = dumps_json(record)
    else:
        header = f"# {run.command}"
        if run.worker_count is not None:
            source = "env" if run.workers_from_env else "flag/default"
            header += f" workers={run.worker_count} ({source})"
        if run.seed is not None:
            header += f" seed={run.seed}"
        for key, value in (notes or {}).items():
            header += f" {key}={value}"
        text = header + "\n" + rows_to_table(rows, columns)
    write_output(text, out)


def common_options(fn):
    fn = click.option("--verbose", "-v", is_flag=True, help="Debug logging on stderr.")(fn)
    fn = click.option("--out", "out", type=click.Path(dir_okay=False), default=None,
                      help="Write the report to PATH instead of stdout.")(fn)
    fn = click.option("--format", "fmt", type=click.Choice(["csv", "json", "table"]), default=None,
                      help="Output format (default: table on a terminal, csv otherwise).")(fn)
    return fn


def sampling_options(fn):
    fn = click.option("--workers", type=click.IntRange(min=1), default=None,
                      help="Worker processes (never changes results).")(fn)
    fn = click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=None,
                      help="Master seed (default: fixed constant from settings).")(fn)
    return fn


@click.group()
@click.version_option(__version__, prog_name="bridgegenus")
def cli() -> None:
    """Genus statistics and certified 4-genus bounds for 2-bridge knots.

    Words are half-parameters a_i: the word 1,-1 is K(2,-2), the trefoil.
    """


# --- exact ---


@cli.command()
@click.option("--n-max", type=int, required=True, help="Largest n (rows 2..n_max).")
@click.option("--unsigned", is_flag=True, help="Ignore signs (unsigned compositions).")
@click.option("--knots", is_flag=True, help="Deduplicate by knot class (enumerates; capped).")
@common_options
@click.pass_context
def exact(ctx: click.Context, n_max: int, unsigned: bool, knots: bool,
          fmt: str | None, out: str | None, verbose: bool) -> None:
    """Exact <g>_n, <g>_n/n and tail fractions for n = 2..n_max."""
    _configure_logging(verbose)
    if n_max < 2:
        click.echo(f"Error: --n-max must be >= 2, got {n_max}", err=True)
        ctx.exit(EXIT_VALIDATION)

    mode = "knots" if knots else "words"
    signed = not unsigned
    fmt = _resolve_format(fmt)
    run = RunConfig(command="exact", n=n_max, signed=signed, mode=mode, output_format=fmt, output_path=out)

    try:
        rows = stats_rows(n_max, signed=signed, mode=mode)
    except EnumerationCapError as e:
        click.echo(f"Error: {e}", err=True)
        ctx.exit(EXIT_RESOURCE)

    check = lemma1_check(n_max)
    notes = {"quarter_bound": "ok" if check.ok else "violated", "min_ratio": str(check.min_ratio),
             "argmin_n": check.argmin_n}
    _emit(rows, EXACT_CSV_COLUMNS, fmt, out, run, notes)
    if not check.ok:
        click.echo(f"Invariant violation: <g>_n / n < 1/4 at n={check.violations[0]}", err=True)
        ctx.exit(EXIT_INVARIANT)


# --- bound ---


@cli.command()
@click.option("--word", default=None, help="Comma-separated half-parameters, e.g. 1,-1,2,-1.")
@click.option("--k", "ks", type=click.IntRange(min=1), multiple=True, default=(32,), show_default=True,
              help="Twist-size cutoff; repeat for a grid.")
@click.option("--s", "ss", type=click.IntRange(min=1), multiple=True, default=(2,), show_default=True,
              help="Chunk half-length; repeat for a grid.")
@click.option("--trace", "show_trace", is_flag=True, help="Print the replayable step list.")
@click.option("--trace-format", type=click.Choice(["text", "json"]), default="text", show_default=True)
@click.option("--replay", "replay_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Verify a saved trace file instead of computing a bound.")
@common_options
@click.pass_context
def bound(ctx: click.Context, word: str | None, ks: tuple[int, ...], ss: tuple[int, ...],
          show_trace: bool, trace_format: str, replay_path: str | None,
          fmt: str | None, out: str | None, verbose: bool) -> None:
    """Certified 4-genus upper bound for one knot."""
    _configure_logging(verbose)

    if replay_path is not None:
        text = Path(replay_path).read_text(encoding="utf-8")
        try:
            trace = trace_from_json(text) if text.lstrip().startswith("{") else trace_from_text(text)
        except TraceFormatError as e:
            click.echo(f"Error: {e}", err=True)
            ctx.exit(EXIT_VALIDATION)
        report = replay(trace)
        if not report.ok:
            click.echo(f"Replay failed at step {report.failed_step}: {report.reason}", err=True)
            ctx.exit(EXIT_INVARIANT)
        click.echo(f"replay ok: total_cost={report.total_cost} bound={report.bound}")
        return

    if word is None:
        click.echo("Error: --word is required (or --replay FILE)", err=True)
        ctx.exit(EXIT_VALIDATION)
    try:
        w = parse_word(word)
    except WordParseError as e:
        click.echo(f"Error: {e}", err=True)
        ctx.exit(EXIT_VALIDATION)

    grid = default_grid(ks, ss)
    value, params, trace = g4_upper_bound_best(w, grid)
    check = replay(trace)
    if not check.ok:
        logger.error("Replay of fresh trace failed: step={}, reason={}", check.failed_step, check.reason)
        ctx.exit(EXIT_INVARIANT)

    low, high = crossing_bounds(w)
    typical_low, typical_high = chunk_count_bounds(trace.n, params.s)
    fmt = _resolve_format(fmt)
    row = {
        "word": format_word(w), "n": trace.n, "m": trace.m, "bound": value,
        "total_cost": trace.total_cost, "k": params.k, "s": params.s,
        "crossing_low": low, "crossing_high": high,
        "writhe": writhe(w), "alternating": str(is_alternating_diagram(w)).lower(),
        "summands": trace.summand_count,
        "typical_summands_low": _num(float(typical_low)),
        "typical_summands_high": _num(float(typical_high)),
        "asymptotic_regime": str(params.in_asymptotic_regime(trace.n)).lower(),
    }
    if show_trace and fmt == "json":
        run = RunConfig(command="bound", grid=grid, output_format=fmt, output_path=out)
        text = dumps_json({"run": run.model_dump(mode="json"), "rows": [row],
                           "trace": trace_to_record(trace)})
        write_output(text, out)
        return

    lines = [f"n={trace.n} m={trace.m} bound={value} ({params})"]
    if show_trace:
        lines.append(trace_to_json(trace) if trace_format == "json" else trace_to_text(trace))
    if fmt == "csv" and not show_trace:
        write_output(rows_to_csv([row], tuple(row)), out)
    else:
        write_output("\n".join(lines).rstrip("\n") + "\n", out)


# --- sweep ---


@cli.command()
@click.option("--n-grid", default="100,1000,10000", show_default=True, help="Ascending n values.")
@click.option("--k", "ks", type=click.IntRange(min=1), multiple=True, default=(2, 3, 4), show_default=True)
@click.option("--s", "ss", type=click.IntRange(min=1), multiple=True, default=(1, 2, 3), show_default=True)
@click.option("--samples", type=click.IntRange(min=1), default=1000, show_default=True)
@click.option("--time-budget", type=click.FloatRange(min=0, min_open=True), default=None,
              help="Seconds per row before reporting partial results.")
@sampling_options
@common_options
@click.pass_context
def sweep(ctx: click.Context, n_grid: str, ks: tuple[int, ...], ss: tuple[int, ...], samples: int,
          time_budget: float | None, seed: int | None, workers: int | None,
          fmt: str | None, out: str | None, verbose: bool) -> None:
    """Monte-Carlo trend of <g4_ub/g>_n along an n grid."""
    _configure_logging(verbose)
    settings = get_settings()
    try:
        n_values = _int_list(n_grid, "--n-grid")
    except click.BadParameter as e:
        click.echo(f"Error: {e.format_message()}", err=True)
        ctx.exit(EXIT_VALIDATION)
    if len(n_values) < 2 or list(n_values) != sorted(n_values) or n_values[0] < 2:
        click.echo("Error: --n-grid needs at least two ascending values >= 2", err=True)
        ctx.exit(EXIT_VALIDATION)

    seed = settings.default_seed if seed is None else seed
    worker_count = workers or settings.resolved_workers()
    grid = default_grid(ks, ss)
    template = SamplerConfig(
        n=n_values[0],
        sample_count=samples,
        master_seed=seed,
        worker_count=worker_count,
        task_size=settings.task_size,
        time_budget_seconds=time_budget or settings.time_budget_seconds,
    )
    report = theorem1_report(n_values, template, grid)

    rows = [{
        "n": r.n,
        "avg_ratio": _num(r.avg_ratio),
        "se_ratio": _num(r.se_ratio),
        "avg_bound_over_n": _num(r.avg_bound_over_n),
        "eight_avg_bound_over_n": _num(r.eight_avg_bound_over_n),
        "tail_fraction": _num(r.tail_fraction),
        "best_params": "" if r.best_params is None else str(r.best_params),
    } for r in report.rows]

    fmt = _resolve_format(fmt)
    run = RunConfig(
        command="sweep", n_grid=n_values, grid=grid, sample_count=samples, seed=seed,
        worker_count=worker_count, workers_from_env=workers is None and settings.workers_from_env(),
        output_format=fmt, output_path=out,
    )
    _emit(rows, SWEEP_COLUMNS, fmt, out, run)

    try:
        require_complete(report, samples)
    except ResourceCapError as e:
        click.echo(f"Resource cap: {e}", err=True)
        ctx.exit(EXIT_RESOURCE)


# --- walk ---


@cli.command()
@click.option("--k", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--s", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--t", type=click.IntRange(min=0), default=100000, show_default=True, help="Summands per trial.")
@click.option("--trials", type=click.IntRange(min=1), default=100, show_default=True)
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=None)
@common_options
@click.pass_context
def walk(ctx: click.Context, k: int, s: int, t: int, trials: int, seed: int | None,
         fmt: str | None, out: str | None, verbose: bool) -> None:
    """Mirror-pair discrepancy |a(w) - a(-w)| against sqrt(t/(2k)^(2s))."""
    _configure_logging(verbose)
    seed = get_settings().default_seed if seed is None else seed
    report = walk_experiment(WalkExperimentConfig(k=k, s=s, t=t, trials=trials, seed=seed))

    row = {
        "k": k, "s": s, "t": t, "trials": trials,
        "mean_discrepancy": _num(report.mean_discrepancy.mean),
        "se_discrepancy": _num(report.mean_discrepancy.std_error) or "undefined",
        "expected_scale": _num(report.expected_scale),
        "normalized_ratio": _num(report.normalized_ratio.mean),
        "se_ratio": _num(report.normalized_ratio.std_error) or "undefined",
        "self_mirror_excess": _num(report.self_mirror_excess.mean),
    }
    fmt = _resolve_format(fmt)
    run = RunConfig(command="walk", seed=seed, output_format=fmt, output_path=out)
    _emit([row], WALK_COLUMNS, fmt, out, run)


# --- enumerate ---


@cli.command("enumerate")
@click.option("--n", type=int, required=True)
@click.option("--knots", is_flag=True, help="One canonical representative per knot class.")
@click.option("--out", "out", type=click.Path(dir_okay=False), default=None)
@click.option("--verbose", "-v", is_flag=True)
@click.pass_context
def enumerate_cmd(ctx: click.Context, n: int, knots: bool, out: str | None, verbose: bool) -> None:
    """Every signed word of complexity n, one per line."""
    _configure_logging(verbose)
    if n < 2:
        click.echo(f"Error: --n must be >= 2, got {n}", err=True)
        ctx.exit(EXIT_VALIDATION)
    try:
        words = enumerate_words(n)
    except EnumerationCapError as e:
        click.echo(f"Error: {e}", err=True)
        ctx.exit(EXIT_RESOURCE)

    if knots:
        seen: set[tuple[int, ...]] = set()
        lines = []
        for w in words:
            c = canonical_entries(w.entries)
            if c not in seen:
                seen.add(c)
                lines.append(format_word(c))
    else:
        lines = [format_word(w) for w in words]
    write_output("\n".join(lines) + "\n", out)


def main() -> None:
    """Console-script entry point with the package's exit codes."""
    try:
        code = cli.main(standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("Aborted", err=True)
        sys.exit(EXIT_VALIDATION)
    except click.ClickException as e:
        e.show()
        sys.exit(EXIT_VALIDATION)
    except (WordParseError, TraceFormatError) as e:
        click.echo(f"Error: {e}", err=True)
        sys.exit(EXIT_VALIDATION)
    except ResourceCapError as e:
        click.echo(f"Error: {e}", err=True)
        sys.exit(EXIT_RESOURCE)
    except InvariantViolation as e:
        click.echo(f"Invariant violation: {e}", err=True)
        sys.exit(EXIT_INVARIANT)
    sys.exit(code if isinstance(code, int) else EXIT_OK)


if __name__ == "__main__":
    main()
