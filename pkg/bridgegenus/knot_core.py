"""Word-level model of 2-bridge knots K(2a_1, ..., 2a_2m).

Two facts drive everything here: the Seifert genus of K(2a_1, ..., 2a_2m)
is m, and the word is unique up to K(a_1, ..., a_2m) = K(-a_2m, ..., -a_1).
Classes are therefore canonicalised at the word level, by lexicographic
minimum of a word and its negate-reverse (both always have equal length).
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

from pydantic import ValidationError

from bridgegenus.errors import WordParseError
from bridgegenus.models import ConnectedSum, KnotClass, TwistWord


def _as_entries(w: TwistWord | Sequence[int]) -> tuple[int, ...]:
    return w.entries if isinstance(w, TwistWord) else tuple(w)


def complexity(w: TwistWord) -> int:
    """n = |a_1| + ... + |a_2m|."""
    return sum(abs(a) for a in w.entries)


def seifert_genus(w: TwistWord) -> int:
    return len(w.entries) // 2


def negate_reverse(w: TwistWord) -> TwistWord:
    return TwistWord.model_construct(entries=tuple(-a for a in reversed(w.entries)))


def mirror(w: TwistWord) -> TwistWord:
    return TwistWord.model_construct(entries=tuple(-a for a in w.entries))


def canonical_entries(entries: tuple[int, ...]) -> tuple[int, ...]:
    """Lexicographic minimum of a tuple and its negate-reverse."""
    other = tuple(-a for a in reversed(entries))
    return entries if entries <= other else other


def canonicalize(w: TwistWord) -> KnotClass:
    return KnotClass.model_construct(
        canonical_word=TwistWord.model_construct(entries=canonical_entries(w.entries))
    )


def mirror_class(c: KnotClass) -> KnotClass:
    return canonicalize(mirror(c.canonical_word))


def is_amphichiral_class(c: KnotClass) -> bool:
    """Self-mirror at the word level: the mirror lands in the same class."""
    return mirror_class(c) == c


def crossing_bounds(w: TwistWord) -> tuple[int, int]:
    """Closed interval containing the crossing number.

    The standard diagram has 2n crossings and reduces to an alternating
    one by removing at most 2m - 1 of them, so n + 1 <= c(K) <= 2n.
    """
    n = complexity(w)
    return n + 1, 2 * n


def writhe(w: TwistWord) -> int:
    """Writhe of the standard diagram.

    Positive odd-position and negative even-position parameters stand for
    positive crossings; each twist region carries 2|a_i| crossings.
    """
    return sum(2 * a if i % 2 == 0 else -2 * a for i, a in enumerate(w.entries))


def is_alternating_diagram(w: TwistWord) -> bool:
    return all(a > 0 for a in w.entries) or all(a < 0 for a in w.entries)


# --- Connected sums ---


def connected_sum(words: Iterable[TwistWord | KnotClass]) -> ConnectedSum:
    classes = [c if isinstance(c, KnotClass) else canonicalize(c) for c in words]
    return ConnectedSum(summands=tuple(classes))


def sum_genus(cs: ConnectedSum) -> int:
    return sum(seifert_genus(c.canonical_word) for c in cs.summands)


# --- Text format ---


def parse_word(text: str) -> TwistWord:
    """Parse comma-separated half-parameters, e.g. ``"1,-1,2,-1"``."""
    if text is None or not text.strip():
        raise WordParseError("empty word")

    entries: list[int] = []
    for position, raw in enumerate(text.split(","), start=1):
        token = raw.strip()
        try:
            value = int(token)
        except ValueError:
            raise WordParseError(
                f'invalid entry "{token}" at position {position}', token=token, position=position
            ) from None
        if value == 0:
            raise WordParseError(
                f'zero entry "{token}" at position {position}', token=token, position=position
            )
        entries.append(value)

    if len(entries) % 2:
        raise WordParseError(f"odd number of entries ({len(entries)}); words need 2m entries")

    try:
        return TwistWord(entries=tuple(entries))
    except ValidationError as e:
        raise WordParseError(str(e)) from e


def format_word(w: TwistWord | Sequence[int]) -> str:
    return ",".join(str(a) for a in _as_entries(w))
