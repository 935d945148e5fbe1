"""Constructive 4-genus upper bounds via cobordism accounting.

The pipeline takes K = K(2a_1, ..., 2a_2m) to a ribbon knot in four moves:

1. remove every aligned pair (a_2i-1, a_2i) containing an entry with
   |a| > k (genus 2 each), giving K';
2. split K' at pair indices s+1, 2(s+1), ... into a connected sum
   K_1 # ... # K_t (genus 1 per split, t - 1 splits);
3. pair each summand with a mirror-image summand; K # mirror(K) is
   ribbon, so these pairs cost nothing;
4. remove the unpaired summands, each at the cost of its Seifert genus.

The total is an upper bound on g_4(K), reported capped at g(K) = m.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterable
from fractions import Fraction
from math import ceil

from loguru import logger
from mpmath import mp, mpf, sqrt

from bridgegenus.knot_core import (
    canonicalize,
    connected_sum,
    mirror_class,
    seifert_genus,
    sum_genus,
)
from bridgegenus.models import (
    STEP_COSTS,
    BoundParams,
    CobordismTrace,
    ConnectedSum,
    KnotClass,
    ReplayReport,
    StepKind,
    TraceStep,
    TwistWord,
    TypeCensus,
)

WORST_CASE_DPS = 60


# --- Moves ---


def _large_pair_indices(entries: tuple[int, ...], k: int) -> list[int]:
    """1-based indices of aligned pairs with an entry exceeding k in absolute value."""
    return [
        i // 2 + 1
        for i in range(0, len(entries), 2)
        if max(abs(entries[i]), abs(entries[i + 1])) > k
    ]


def _delete_pairs(entries: tuple[int, ...], pair_indices: Iterable[int]) -> tuple[int, ...]:
    drop = set(pair_indices)
    return tuple(a for i, a in enumerate(entries) if i // 2 + 1 not in drop)


def remove_large_pairs(w: TwistWord, k: int) -> tuple[TwistWord | None, int]:
    """Delete all large pairs at once; None stands for the unknot."""
    indices = _large_pair_indices(w.entries, k)
    if not indices:
        return w, 0
    remaining = _delete_pairs(w.entries, indices)
    word = TwistWord.model_construct(entries=remaining) if remaining else None
    return word, len(indices)


def split_indices(m: int, s: int) -> list[int]:
    """Pair indices j(s+1) for j = 1, ..., t-1 with t = ceil(m / (s+1))."""
    t = ceil(m / (s + 1))
    return [j * (s + 1) for j in range(1, t)]


def _split_entries(entries: tuple[int, ...], splits: Iterable[int]) -> list[tuple[int, ...]]:
    """Delete the given pairs and cut the word there; empty pieces are the unknot."""
    pieces: list[tuple[int, ...]] = []
    start = 0
    for i in sorted(splits):
        pieces.append(entries[start:2 * i - 2])
        start = 2 * i
    pieces.append(entries[start:])
    return [p for p in pieces if p]


def chunk(w: TwistWord, s: int) -> tuple[ConnectedSum, int]:
    splits = split_indices(len(w.entries) // 2, s)
    pieces = _split_entries(w.entries, splits)
    return connected_sum(TwistWord.model_construct(entries=p) for p in pieces), len(splits)


def _pair_classes(counts: Counter[KnotClass]) -> tuple[list[tuple[KnotClass, KnotClass]], Counter[KnotClass]]:
    """Greedy mirror pairing in class order: (pairs, leftover counts)."""
    pairs: list[tuple[KnotClass, KnotClass]] = []
    residual: Counter[KnotClass] = Counter()
    done: set[KnotClass] = set()
    for c in sorted(counts, key=lambda x: x.sort_key):
        if c in done:
            continue
        mc = mirror_class(c)
        done.update((c, mc))
        if mc == c:
            pairs.extend([(c, c)] * (counts[c] // 2))
            if counts[c] % 2:
                residual[c] = 1
            continue
        matched = min(counts[c], counts.get(mc, 0))
        pairs.extend([(c, mc)] * matched)
        if counts[c] > matched:
            residual[c] = counts[c] - matched
        if counts.get(mc, 0) > matched:
            residual[mc] = counts[mc] - matched
    return pairs, residual


def cancel_mirror_pairs(cs: ConnectedSum) -> tuple[ConnectedSum, int]:
    pairs, residual = _pair_classes(cs.counts())
    return ConnectedSum(summands=tuple(residual.elements())), len(pairs)


def type_census(cs: ConnectedSum, s: int) -> TypeCensus:
    return TypeCensus(s=s, counts=dict(cs.counts()))


def remove_residual(cs: ConnectedSum) -> tuple[tuple[TraceStep, ...], int]:
    steps = tuple(
        TraceStep(
            kind=StepKind.REMOVE_RESIDUAL,
            genus_cost=seifert_genus(c.canonical_word),
            classes=(c,),
        )
        for c in cs.summands
    )
    return steps, sum_genus(cs)


# --- Pipeline ---


def g4_upper_bound(w: TwistWord, p: BoundParams) -> tuple[int, CobordismTrace]:
    steps: list[TraceStep] = [
        TraceStep(kind=StepKind.REMOVE_LARGE_PAIR, genus_cost=2, pair_index=i)
        for i in _large_pair_indices(w.entries, p.k)
    ]
    reduced, _ = remove_large_pairs(w, p.k)

    final = ConnectedSum()
    if reduced is not None:
        splits = split_indices(len(reduced.entries) // 2, p.s)
        steps.extend(
            TraceStep(kind=StepKind.SPLIT, genus_cost=1, pair_index=i) for i in splits
        )
        summands, _ = chunk(reduced, p.s)
        types = type_census(summands, p.s)
        pairs, residual = _pair_classes(Counter(types.counts))
        steps.extend(
            TraceStep(kind=StepKind.CANCEL_MIRROR_PAIR, genus_cost=0, classes=(c, mc))
            for c, mc in pairs
        )
        residual_steps, _ = remove_residual(ConnectedSum(summands=tuple(residual.elements())))
        steps.extend(residual_steps)
        final = ConnectedSum(summands=tuple(c for pair in pairs for c in pair))

    trace = CobordismTrace(initial_word=w, params=p, steps=tuple(steps), final=final)
    return trace.bound, trace


def g4_upper_bound_best(
    w: TwistWord, grid: Iterable[BoundParams]
) -> tuple[int, BoundParams, CobordismTrace]:
    """Minimum bound over a parameter grid; ties go to smaller k, then smaller s."""
    ordered = sorted(set(grid), key=lambda p: p.sort_key)
    if not ordered:
        raise ValueError("parameter grid is empty")
    best: tuple[int, BoundParams, CobordismTrace] | None = None
    for p in ordered:
        bound, trace = g4_upper_bound(w, p)
        if best is None or bound < best[0]:
            best = (bound, p, trace)
    return best


def default_grid(ks: Iterable[int], ss: Iterable[int]) -> tuple[BoundParams, ...]:
    return tuple(sorted(
        {BoundParams(k=k, s=s) for k in ks for s in ss}, key=lambda p: p.sort_key
    ))


# --- Asymptotic formula ---


def worst_case_bound(n: int, p: BoundParams) -> mpf:
    """2n/k + n/(2(s+1)) + (s/2)(2k)^(2s) sqrt(n / (2(s+1)(2k)^(2s)))."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    with mp.workdps(WORST_CASE_DPS):
        n_, k, s = mpf(n), mpf(p.k), mpf(p.s)
        types = (2 * k) ** (2 * s)
        value = 2 * n_ / k + n_ / (2 * (s + 1)) + (s / 2) * types * sqrt(n_ / (2 * (s + 1) * types))
    return value


def limit_value(p: BoundParams) -> Fraction:
    """Limit of worst_case_bound(n) / n as n grows: 2/k + 1/(2(s+1))."""
    return Fraction(2, p.k) + Fraction(1, 2 * (p.s + 1))


def limit_crossover(p: BoundParams, rel_tol: float = 0.01) -> int:
    """Smallest n with worst_case_bound(n)/n within rel_tol of the limit."""
    with mp.workdps(WORST_CASE_DPS):
        s = mpf(p.s)
        types = (2 * mpf(p.k)) ** (2 * s)
        limit = mpf(limit_value(p).numerator) / limit_value(p).denominator
        n = (s / 2) ** 2 * types / (2 * (s + 1)) / (mpf(rel_tol) * limit) ** 2
        return max(2, int(mp.ceil(n)))


def chunk_count_bounds(n: int, s: int) -> tuple[Fraction, Fraction]:
    """n/(16(s+1)) <= t <= n/(2(s+1)), up to an error of one, when n/16 <= m <= n/2."""
    return Fraction(n, 16 * (s + 1)), Fraction(n, 2 * (s + 1))


# --- Certification ---

_PHASE = {
    StepKind.REMOVE_LARGE_PAIR: 0,
    StepKind.SPLIT: 1,
    StepKind.CANCEL_MIRROR_PAIR: 2,
    StepKind.REMOVE_RESIDUAL: 3,
}


def _fail(reason: str, step: int | None = None) -> ReplayReport:
    logger.debug("Replay failed: step={}, reason={}", step, reason)
    return ReplayReport(ok=False, reason=reason, failed_step=step)


def replay(trace: CobordismTrace) -> ReplayReport:
    """Re-execute a trace from its initial word and check every move and cost."""
    entries = trace.initial_word.entries
    k, s = trace.params.k, trace.params.s
    m = len(entries) // 2

    phase = 0
    removed: list[int] = []
    splits: list[int] = []
    reduced: tuple[int, ...] | None = None
    live: Counter[KnotClass] | None = None
    ribbon: Counter[KnotClass] = Counter()

    def enter(target: int) -> str | None:
        """Apply the moves of finished phases; returns a failure reason or None."""
        nonlocal phase, reduced, live
        if phase < 1 <= target:
            expected = _large_pair_indices(entries, k)
            if sorted(removed) != expected:
                return f"large pairs removed {sorted(removed)}, expected {expected}"
            reduced = _delete_pairs(entries, removed)
        if phase < 2 <= target:
            expected = split_indices(len(reduced) // 2, s) if reduced else []
            if sorted(splits) != expected:
                return f"splits at {sorted(splits)}, expected {expected}"
            live = Counter(
                canonicalize(TwistWord.model_construct(entries=piece))
                for piece in _split_entries(reduced, splits)
            )
        phase = max(phase, target)
        return None

    for idx, step in enumerate(trace.steps):
        step_phase = _PHASE[step.kind]
        if step_phase < phase:
            return _fail(f"{step.kind} after a later phase", idx)
        if (reason := enter(step_phase)) is not None:
            return _fail(reason, idx)

        fixed_cost = STEP_COSTS[step.kind]
        if fixed_cost is not None and step.genus_cost != fixed_cost:
            return _fail(f"{step.kind} costs {fixed_cost}, trace says {step.genus_cost}", idx)

        if step.kind == StepKind.REMOVE_LARGE_PAIR:
            i = step.pair_index
            if i is None or not 1 <= i <= m or i in removed:
                return _fail(f"invalid large-pair index {i}", idx)
            removed.append(i)

        elif step.kind == StepKind.SPLIT:
            i = step.pair_index
            if reduced is None or i is None or not 1 <= i <= len(reduced) // 2 or i in splits:
                return _fail(f"invalid split index {i}", idx)
            splits.append(i)

        elif step.kind == StepKind.CANCEL_MIRROR_PAIR:
            if len(step.classes) != 2:
                return _fail("cancellation needs exactly two classes", idx)
            c, mc = step.classes
            if mirror_class(c) != mc:
                return _fail(f"{mc} is not the mirror class of {c}", idx)
            need = Counter([c, mc])
            if any(live[x] < cnt for x, cnt in need.items()):
                return _fail(f"summands {c} and {mc} are not both present", idx)
            live.subtract(need)
            ribbon.update(need)

        else:
            if len(step.classes) != 1:
                return _fail("residual removal needs exactly one class", idx)
            (c,) = step.classes
            genus = seifert_genus(c.canonical_word)
            if step.genus_cost != genus:
                return _fail(f"residual {c} costs {genus}, trace says {step.genus_cost}", idx)
            if live[c] < 1:
                return _fail(f"summand {c} is not present", idx)
            live[c] -= 1

    if (reason := enter(3)) is not None:
        return _fail(reason)

    leftover = +live if live is not None else Counter()
    if leftover:
        return _fail(f"unaccounted summands: {ConnectedSum(summands=tuple(leftover.elements()))}")
    if ConnectedSum(summands=tuple(ribbon.elements())) != trace.final:
        return _fail("final state does not match the cancelled ribbon pairs")

    return ReplayReport(ok=True, total_cost=trace.total_cost, bound=trace.bound)
