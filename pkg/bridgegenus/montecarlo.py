"""Uniform sampling of signed words and Monte-Carlo genus statistics.

Samples are split into tasks of fixed size. Task i draws from its own
generator seeded by ``SeedSequence(master_seed, spawn_key=(n,)).spawn(...)[i]``
and partial sums are merged in task order, so a report depends only on
the seed and configuration, never on the number of worker processes.
"""

from __future__ import annotations

import asyncio
import math
import time
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache
from typing import Any

import numpy as np
from loguru import logger
from pydantic import BaseModel

from bridgegenus.bound_kernel import canonical_rows, fast_bound_best
from bridgegenus.errors import ResourceCapError
from bridgegenus.models import (
    AlphabetCensus,
    BoundParams,
    Estimate,
    SamplerConfig,
    StatsReport,
    Theorem1Report,
    Theorem1Row,
    TwistWord,
    WalkExperimentConfig,
    WalkReport,
)
from bridgegenus.partition_stats import census


# --- Sampling ---


@lru_cache(maxsize=64)
def part_count_cdf(n: int) -> np.ndarray:
    """Cumulative P(m <= j) for j = 1..n//2 under the uniform measure on signed words.

    Built from exact census integers; each entry is the correctly rounded
    float of an exact integer ratio.
    """
    c = census(n, signed=True)
    total = c.total
    running = 0
    cdf = np.empty(len(c.per_m_counts), dtype=np.float64)
    for i, m in enumerate(sorted(c.per_m_counts)):
        running += c.per_m_counts[m]
        cdf[i] = running / total
    cdf.flags.writeable = False
    return cdf


def sample_entries(n: int, rng: np.random.Generator, cdf: np.ndarray | None = None) -> np.ndarray:
    """One uniformly random signed word of complexity n, as an int64 array.

    ``cdf`` is ``part_count_cdf(n)``, passed in by callers that already hold it.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if cdf is None:
        cdf = part_count_cdf(n)
    m = min(int(np.searchsorted(cdf, rng.random(), side="right")), cdf.size - 1) + 1

    cuts = np.sort(rng.choice(n - 1, size=2 * m - 1, replace=False)) + 1
    bounds = np.concatenate(([0], cuts, [n]))
    parts = np.diff(bounds)
    signs = rng.integers(0, 2, size=2 * m) * 2 - 1
    return (parts * signs).astype(np.int64)


def sample_word(n: int, rng: np.random.Generator) -> TwistWord:
    return TwistWord.model_construct(entries=tuple(int(a) for a in sample_entries(n, rng)))


# --- Task plumbing ---


class TaskSums(BaseModel):
    """Partial sums from one sampling task."""

    count: int = 0
    genus_sum: int = 0
    genus_sq: int = 0
    bound_sum: int = 0
    bound_sq: int = 0
    ratio_sum: float = 0.0
    ratio_sq: float = 0.0
    tail_count: int = 0
    wins: tuple[int, ...] = ()


def task_seeds(master_seed: int, n: int, task_count: int) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(master_seed, spawn_key=(n,)).spawn(task_count)


def task_sizes(sample_count: int, task_size: int) -> list[int]:
    full, rest = divmod(sample_count, task_size)
    return [task_size] * full + ([rest] if rest else [])


def _sample_task(
    n: int,
    count: int,
    seed: np.random.SeedSequence,
    grid: tuple[tuple[int, int], ...],
    cdf: np.ndarray,
) -> TaskSums:
    rng = np.random.default_rng(seed)
    params = [BoundParams(k=k, s=s) for k, s in grid]
    position = {p: i for i, p in enumerate(params)}
    wins = [0] * len(params)
    sums = dict(genus_sum=0, genus_sq=0, bound_sum=0, bound_sq=0, tail_count=0)
    ratio_sum = ratio_sq = 0.0

    for _ in range(count):
        entries = sample_entries(n, rng, cdf)
        m = entries.size // 2
        bound, best = fast_bound_best(entries, params)
        wins[position[best]] += 1
        ratio = bound / m
        sums["genus_sum"] += m
        sums["genus_sq"] += m * m
        sums["bound_sum"] += bound
        sums["bound_sq"] += bound * bound
        sums["tail_count"] += int(8 * m <= n)
        ratio_sum += ratio
        ratio_sq += ratio * ratio

    return TaskSums(count=count, ratio_sum=ratio_sum, ratio_sq=ratio_sq, wins=tuple(wins), **sums)


async def run_tasks(
    fn: Callable[..., Any],
    args_list: Sequence[tuple],
    workers: int,
    time_budget: float | None = None,
) -> tuple[list[Any], bool]:
    """Run ``fn(*args)`` for each argument tuple; results come back in input order.

    With a time budget, only the longest completed prefix is returned and
    the second element flags the run as incomplete. Pending tasks are
    cancelled; tasks already running finish before this returns.
    """
    if workers <= 1 or len(args_list) <= 1:
        start = time.monotonic()
        results = []
        for args in args_list:
            if time_budget is not None and time.monotonic() - start > time_budget:
                return results, True
            results.append(fn(*args))
        return results, False

    loop = asyncio.get_running_loop()
    pool = ProcessPoolExecutor(max_workers=workers)
    try:
        futures = [loop.run_in_executor(pool, fn, *args) for args in args_list]
        if time_budget is None:
            return list(await asyncio.gather(*futures)), False

        await asyncio.wait(futures, timeout=time_budget)
        results = []
        for future in futures:
            if not future.done() or future.cancelled():
                break
            results.append(future.result())
        incomplete = len(results) < len(futures)
        for future in futures:
            future.cancel()
        return results, incomplete
    finally:
        pool.shutdown(wait=True, cancel_futures=True)


def _estimate(total: float, squares: float, count: int) -> Estimate:
    if count == 0:
        return Estimate(mean=0.0, std_error=None, sample_size=0)
    mean = total / count
    if count < 2:
        return Estimate(mean=mean, std_error=None, sample_size=count)
    variance = max((squares - total * total / count) / (count - 1), 0.0)
    return Estimate(mean=mean, std_error=math.sqrt(variance / count), sample_size=count)


def _grid_tuple(grid: Sequence[BoundParams]) -> tuple[tuple[int, int], ...]:
    ordered = sorted(set(grid), key=lambda p: p.sort_key)
    if not ordered:
        raise ValueError("parameter grid is empty")
    return tuple((p.k, p.s) for p in ordered)


# --- Estimators ---


async def estimate_stats_async(cfg: SamplerConfig, grid: Sequence[BoundParams]) -> StatsReport:
    grid_t = _grid_tuple(grid)
    sizes = task_sizes(cfg.sample_count, cfg.task_size)
    seeds = task_seeds(cfg.master_seed, cfg.n, len(sizes))
    cdf = part_count_cdf(cfg.n)
    args = [(cfg.n, size, seed, grid_t, cdf) for size, seed in zip(sizes, seeds)]

    logger.info(
        "Sampling: n={}, samples={}, tasks={}, workers={}, grid={}",
        cfg.n, cfg.sample_count, len(args), cfg.worker_count, len(grid_t),
    )
    started = time.monotonic()
    parts, incomplete = await run_tasks(_sample_task, args, cfg.worker_count, cfg.time_budget_seconds)
    if incomplete:
        logger.warning(
            "Time budget hit: n={}, tasks_done={}/{}, budget={}s",
            cfg.n, len(parts), len(args), cfg.time_budget_seconds,
        )

    count = genus_sum = genus_sq = bound_sum = bound_sq = tail = 0
    ratio_sum = ratio_sq = 0.0
    wins = [0] * len(grid_t)
    for part in parts:  # fixed task order
        count += part.count
        genus_sum += part.genus_sum
        genus_sq += part.genus_sq
        bound_sum += part.bound_sum
        bound_sq += part.bound_sq
        tail += part.tail_count
        ratio_sum += part.ratio_sum
        ratio_sq += part.ratio_sq
        wins = [a + b for a, b in zip(wins, part.wins)]

    params = tuple(BoundParams(k=k, s=s) for k, s in grid_t)
    best = params[max(range(len(params)), key=lambda i: (wins[i], -i))] if count else None

    logger.debug("Sampling done: n={}, samples={}, elapsed={:.2f}s", cfg.n, count, time.monotonic() - started)
    return StatsReport(
        n=cfg.n,
        avg_genus=_estimate(genus_sum, genus_sq, count),
        avg_bound=_estimate(bound_sum, bound_sq, count),
        avg_ratio=_estimate(ratio_sum, ratio_sq, count),
        tail_fraction=_estimate(tail, tail, count),
        params_used=params,
        best_params=best,
        master_seed=cfg.master_seed,
        worker_count=cfg.worker_count,
        task_size=cfg.task_size,
        incomplete=incomplete,
    )


def estimate_stats(cfg: SamplerConfig, grid: Sequence[BoundParams]) -> StatsReport:
    return asyncio.run(estimate_stats_async(cfg, grid))


async def theorem1_report_async(
    n_grid: Sequence[int], template: SamplerConfig, grid: Sequence[BoundParams]
) -> Theorem1Report:
    if len(n_grid) < 2 or list(n_grid) != sorted(n_grid):
        raise ValueError("n_grid must be sorted ascending with at least two entries")

    rows: list[Theorem1Row] = []
    for n in n_grid:
        report = await estimate_stats_async(template.model_copy(update={"n": n}), grid)
        avg_bound_over_n = report.avg_bound.mean / n
        rows.append(Theorem1Row(
            n=n,
            avg_ratio=report.avg_ratio.mean,
            se_ratio=report.avg_ratio.std_error,
            avg_bound_over_n=avg_bound_over_n,
            eight_avg_bound_over_n=8 * avg_bound_over_n,
            avg_genus_over_n=report.avg_genus.mean / n,
            tail_fraction=report.tail_fraction.mean,
            best_params=report.best_params,
            sample_count=report.avg_ratio.sample_size,
            incomplete=report.incomplete,
        ))
        logger.info("Sweep row done: n={}, avg_ratio={:.4f}", n, report.avg_ratio.mean)

    return Theorem1Report(
        rows=tuple(rows),
        grid=tuple(BoundParams(k=k, s=s) for k, s in _grid_tuple(grid)),
        master_seed=template.master_seed,
    )


def theorem1_report(
    n_grid: Sequence[int], template: SamplerConfig, grid: Sequence[BoundParams]
) -> Theorem1Report:
    return asyncio.run(theorem1_report_async(n_grid, template, grid))


def require_complete(report: Theorem1Report, sample_count: int) -> None:
    """Raise ResourceCapError naming every row the time budget cut short."""
    short = [r for r in report.rows if r.incomplete]
    if short:
        detail = ", ".join(f"n={r.n} used {r.sample_count}/{sample_count} samples" for r in short)
        raise ResourceCapError(f"time budget hit: {detail}")


# --- Random-walk discrepancy ---


def alphabet_class_census(k: int, s: int) -> AlphabetCensus:
    """Class counts among words of length 2s over {-k..-1, 1..k}.

    (2k)^s words are fixed by negate-reverse (singleton classes) and come
    in distinct mirror pairs; (2k)^s palindromes form self-mirror classes
    {w, -w}; every other class has two words.
    """
    words = (2 * k) ** (2 * s)
    half = (2 * k) ** s
    return AlphabetCensus(
        k=k,
        s=s,
        words=words,
        classes=(words + half) // 2,
        self_mirror_classes=half // 2,
        distinct_pairs=words // 4,
    )


def draw_summand_rows(k: int, s: int, t: int, rng: np.random.Generator) -> np.ndarray:
    """t uniform words of length 2s over {-k..-1, 1..k}, one per row."""
    digits = rng.integers(0, 2 * k, size=(t, 2 * s))
    return (digits - k + (digits >= k)).astype(np.int64)


def _trial_discrepancy(rows: np.ndarray, t: int, words: int) -> tuple[float, float, float]:
    """(sum of |a(w)-a(-w)|, sum of per-pair normalised gaps, self-mirror leftovers)."""
    canon = canonical_rows(rows)
    uniq, counts = np.unique(canon, axis=0, return_counts=True)
    mirrors = canonical_rows(-uniq)
    q = uniq.shape[0]

    _, inverse = np.unique(np.vstack([uniq, mirrors]), axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    ids, mirror_ids = inverse[:q], inverse[q:]
    lookup = np.zeros(int(inverse.max()) + 1, dtype=np.int64)
    lookup[ids] = counts
    partner_counts = lookup[mirror_ids]

    self_mirror = ids == mirror_ids
    leftover_self = float((counts[self_mirror] % 2).sum())

    distinct = ~self_mirror
    singleton = (uniq == -uniq[:, ::-1]).all(axis=1)
    prob = np.where(singleton, 1.0, 2.0)[distinct] / words
    gap = np.abs(counts[distinct] - partner_counts[distinct]).astype(np.float64)
    weight = np.where(partner_counts[distinct] > 0, 0.5, 1.0)
    raw = float((weight * gap).sum())
    normalized = float((weight * gap / np.sqrt(t * prob)).sum())
    return raw, normalized, leftover_self


def walk_experiment(cfg: WalkExperimentConfig) -> WalkReport:
    alphabet = alphabet_class_census(cfg.k, cfg.s)
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed))

    means, ratios, excess = [], [], []
    for _ in range(cfg.trials):
        if cfg.t == 0:
            means.append(0.0)
            ratios.append(0.0)
            excess.append(0.0)
            continue
        rows = draw_summand_rows(cfg.k, cfg.s, cfg.t, rng)
        raw, normalized, leftover = _trial_discrepancy(rows, cfg.t, alphabet.words)
        means.append(raw / alphabet.distinct_pairs)
        ratios.append(normalized / alphabet.distinct_pairs)
        excess.append(leftover / alphabet.self_mirror_classes)

    def estimate(values: list[float]) -> Estimate:
        return _estimate(sum(values), sum(v * v for v in values), len(values))

    report = WalkReport(
        config=cfg,
        word_count=alphabet.words,
        distinct_pairs=alphabet.distinct_pairs,
        self_mirror_classes=alphabet.self_mirror_classes,
        expected_scale=math.sqrt(cfg.t / alphabet.words),
        mean_discrepancy=estimate(means),
        normalized_ratio=estimate(ratios),
        self_mirror_excess=estimate(excess),
    )
    logger.info(
        "Walk experiment: k={}, s={}, t={}, trials={}, ratio={:.4f}",
        cfg.k, cfg.s, cfg.t, cfg.trials, report.normalized_ratio.mean,
    )
    return report
