"""Exact counts and averages over signed ordered even compositions.

Words of complexity n with 2m parts are the compositions of n into 2m
positive parts (C(n-1, 2m-1) of them), each carrying 2^(2m) sign choices.
All statistics here are exact rationals.
"""

from __future__ import annotations

from collections.abc import Iterator
from fractions import Fraction
from itertools import combinations, product
from typing import Literal

from loguru import logger

from bridgegenus.config import get_settings
from bridgegenus.errors import EnumerationCapError, InvariantViolation
from bridgegenus.knot_core import canonical_entries
from bridgegenus.models import CompositionCensus, ExactStat, LemmaReport, LemmaRow, TwistWord

Mode = Literal["words", "knots"]

DEFAULT_TAIL_THRESHOLD = Fraction(1, 8)


def _check_n(n: int) -> None:
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")


def _check_cap(n: int, cap: int | None) -> None:
    cap = get_settings().enumeration_cap if cap is None else cap
    if n > cap:
        raise EnumerationCapError(n, cap)


def census(n: int, signed: bool = True) -> CompositionCensus:
    """Words of complexity n per pair count m.

    Terms follow C(n-1, 2m+1) = C(n-1, 2m-1)(n-2m)(n-2m-1) / (2m(2m+1)),
    one small multiply and one exact division per m.
    """
    _check_n(n)
    weight = 4 if signed else 1
    per_m: dict[int, int] = {}
    count = (n - 1) * weight
    for m in range(1, n // 2 + 1):
        per_m[m] = count
        count = count * (n - 2 * m) * (n - 2 * m - 1) // (2 * m * (2 * m + 1)) * weight
    return CompositionCensus(n=n, signed=signed, per_m_counts=per_m)


def count_words(n: int, signed: bool = True) -> int:
    return census(n, signed).total


def signed_count_closed_form(n: int) -> int:
    """3^(n-1) + (-1)^n; redundant check on the binomial sum."""
    _check_n(n)
    return 3 ** (n - 1) + (-1) ** n


def unsigned_count_closed_form(n: int) -> int:
    _check_n(n)
    return 2 ** (n - 2)


def _compositions(n: int, parts: int) -> Iterator[tuple[int, ...]]:
    for cuts in combinations(range(1, n), parts - 1):
        bounds = (0, *cuts, n)
        yield tuple(bounds[i + 1] - bounds[i] for i in range(parts))


def _signed_entries(n: int, first_entry: int | None = None) -> Iterator[tuple[int, ...]]:
    for m in range(1, n // 2 + 1):
        for parts in _compositions(n, 2 * m):
            if first_entry is not None and parts[0] != abs(first_entry):
                continue
            for signs in product((1, -1), repeat=2 * m):
                entries = tuple(p * e for p, e in zip(parts, signs))
                if first_entry is not None and entries[0] != first_entry:
                    continue
                yield entries


def enumerate_words(
    n: int,
    first_entry: int | None = None,
    cap: int | None = None,
) -> Iterator[TwistWord]:
    """Every signed word of complexity n, exactly once.

    ``first_entry`` restricts the stream to words starting with that value,
    which partitions the full stream for parallel consumers.
    """
    _check_n(n)
    _check_cap(n, cap)
    return (TwistWord.model_construct(entries=e) for e in _signed_entries(n, first_entry))


def _unsigned_entries(n: int) -> Iterator[tuple[int, ...]]:
    for m in range(1, n // 2 + 1):
        yield from _compositions(n, 2 * m)


def _knot_class_genera(n: int, signed: bool) -> tuple[int, int]:
    """(number of classes, sum of genera) after deduplicating the symmetry.

    Unsigned compositions only carry the reversal part of the symmetry.
    """
    seen: set[tuple[int, ...]] = set()
    genus_sum = 0
    if signed:
        stream = _signed_entries(n)
        key = canonical_entries
    else:
        stream = _unsigned_entries(n)
        key = lambda e: min(e, e[::-1])  # noqa: E731
    for entries in stream:
        c = key(entries)
        if c not in seen:
            seen.add(c)
            genus_sum += len(c) // 2
    return len(seen), genus_sum


def knot_class_count(n: int, signed: bool = True, cap: int | None = None) -> int:
    _check_n(n)
    _check_cap(n, cap)
    return _knot_class_genera(n, signed)[0]


def avg_genus_exact(
    n: int,
    signed: bool = True,
    mode: Mode = "words",
    cap: int | None = None,
) -> ExactStat:
    _check_n(n)
    if mode == "words":
        c = census(n, signed)
        weighted = sum(m * count for m, count in c.per_m_counts.items())
        value = Fraction(weighted, c.total)
    else:
        _check_cap(n, cap)
        classes, genus_sum = _knot_class_genera(n, signed)
        value = Fraction(genus_sum, classes)
    return ExactStat(value=value, n=n, mode=mode, signed=signed)


def tail_fraction(
    n: int,
    threshold: Fraction = DEFAULT_TAIL_THRESHOLD,
    signed: bool = True,
) -> ExactStat:
    """Fraction of words with m <= threshold * n."""
    _check_n(n)
    threshold = Fraction(threshold)
    c = census(n, signed)
    tail = sum(count for m, count in c.per_m_counts.items() if m <= threshold * n)
    return ExactStat(value=Fraction(tail, c.total), n=n, mode="words", signed=signed)


def lemma1_check(n_max: int, raise_on_violation: bool = False) -> LemmaReport:
    """Evaluate <g>_n / n >= 1/4 for 2 <= n <= n_max (signed words)."""
    _check_n(n_max)
    quarter = Fraction(1, 4)
    rows: list[LemmaRow] = []
    violations: list[int] = []
    for n in range(2, n_max + 1):
        avg = avg_genus_exact(n, signed=True, mode="words").value
        ratio = avg / n
        rows.append(LemmaRow(
            n=n,
            avg_genus=avg,
            ratio=ratio,
            tail_fraction=tail_fraction(n).value,
        ))
        if ratio < quarter:
            violations.append(n)

    best = min(rows, key=lambda r: (r.ratio, r.n))
    report = LemmaReport(
        ok=not violations,
        n_max=n_max,
        min_ratio=best.ratio,
        argmin_n=best.n,
        violations=tuple(violations),
        rows=tuple(rows),
    )
    logger.debug("Quarter bound check: n_max={}, min_ratio={}, ok={}", n_max, best.ratio, report.ok)
    if violations and raise_on_violation:
        raise InvariantViolation(f"<g>_n / n < 1/4 at n={violations[0]}")
    return report


def stats_rows(
    n_max: int,
    signed: bool = True,
    mode: Mode = "words",
    threshold: Fraction = DEFAULT_TAIL_THRESHOLD,
) -> list[dict[str, str]]:
    """Rows for CSV emission, exact values split into numerator/denominator."""
    _check_n(n_max)
    rows: list[dict[str, str]] = []
    for n in range(2, n_max + 1):
        avg = avg_genus_exact(n, signed=signed, mode=mode).value
        tail = tail_fraction(n, threshold, signed).value
        rows.append({
            "n": str(n),
            "mode": mode,
            "signed": "true" if signed else "false",
            "avg_genus_num": str(avg.numerator),
            "avg_genus_den": str(avg.denominator),
            "ratio_decimal": f"{float(avg / n):.12f}",
            "tail_num": str(tail.numerator),
            "tail_den": str(tail.denominator),
        })
    return rows


CSV_COLUMNS = (
    "n", "mode", "signed", "avg_genus_num", "avg_genus_den",
    "ratio_decimal", "tail_num", "tail_den",
)
