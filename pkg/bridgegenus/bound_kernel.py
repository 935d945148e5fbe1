"""Vectorised cost accounting for the cobordism pipeline.

Computes the same numbers as ``cobordism_engine.g4_upper_bound`` without
building a trace, on numpy int64 word arrays. Sampling at n ~ 10^5 runs
this kernel once per (word, grid point), so everything stays in numpy:
chunks of exactly s pairs become rows, rows are canonicalised by a
row-wise lexicographic minimum, and ``np.unique`` over rows gives the
class census.
"""

from __future__ import annotations

from collections.abc import Iterable

import numpy as np

from bridgegenus.models import BoundParams, FastBound, TwistWord


def word_array(w: TwistWord) -> np.ndarray:
    return np.asarray(w.entries, dtype=np.int64)


def _lexmin_rows(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    diff = a != b
    first = diff.argmax(axis=1)
    rows = np.arange(a.shape[0])
    take_b = diff.any(axis=1) & (b[rows, first] < a[rows, first])
    return np.where(take_b[:, None], b, a)


def canonical_rows(rows: np.ndarray) -> np.ndarray:
    """Canonical representative of each row under negate-reverse."""
    return _lexmin_rows(rows, -rows[:, ::-1])


def residual_count(rows: np.ndarray) -> int:
    """Summands left after greedy mirror cancellation among equal-length rows."""
    if rows.shape[0] == 0:
        return 0
    canon = canonical_rows(rows)
    mirrors = canonical_rows(-canon)
    q = canon.shape[0]

    _, inverse = np.unique(np.vstack([canon, mirrors]), axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    ids, mirror_ids = inverse[:q], inverse[q:]

    counts = np.bincount(ids, minlength=int(inverse.max()) + 1)
    mirror_of = np.full(counts.shape[0], -1, dtype=np.int64)
    mirror_of[ids] = mirror_ids

    present = np.flatnonzero(counts)
    partner = mirror_of[present]
    own = counts[present]
    other = counts[partner]

    self_mirror = partner == present
    leftover_self = int((own[self_mirror] % 2).sum())

    distinct = ~self_mirror
    gap = np.abs(own[distinct] - other[distinct])
    # pairs with both sides present are visited twice
    doubled = np.where(other[distinct] > 0, gap, 2 * gap)
    leftover_distinct = int(doubled.sum()) // 2

    return leftover_self + leftover_distinct


def fast_bound(entries: np.ndarray, k: int, s: int) -> FastBound:
    a = np.asarray(entries, dtype=np.int64)
    m = a.size // 2
    pairs = a.reshape(m, 2)

    large = np.abs(pairs).max(axis=1) > k
    removed = int(large.sum())
    kept = pairs[~large]
    m1 = kept.shape[0]
    if m1 == 0:
        return FastBound(removed_pairs=removed, split_count=0, residual_cost=0, genus=m)

    t = -(-m1 // (s + 1))
    full = t - 1
    blocks = kept[: full * (s + 1)].reshape(full, s + 1, 2)[:, :s, :].reshape(full, 2 * s)
    last = kept[full * (s + 1):].reshape(1, -1)

    extra = 0
    if last.shape[1] == 2 * s:
        blocks = np.vstack([blocks, last])
    else:
        extra = last.shape[1] // 2

    residual_cost = s * residual_count(blocks) + extra
    return FastBound(removed_pairs=removed, split_count=full, residual_cost=residual_cost, genus=m)


def fast_bound_best(entries: np.ndarray, grid: Iterable[BoundParams]) -> tuple[int, BoundParams]:
    """Same tie-break as g4_upper_bound_best: smaller k, then smaller s."""
    ordered = sorted(set(grid), key=lambda p: p.sort_key)
    if not ordered:
        raise ValueError("parameter grid is empty")
    best_bound, best_params = -1, ordered[0]
    for p in ordered:
        bound = fast_bound(entries, p.k, p.s).bound
        if best_bound < 0 or bound < best_bound:
            best_bound, best_params = bound, p
    return best_bound, best_params
