"""Tests for Bridgegenus knot core module."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bridgegenus.errors import WordParseError
from bridgegenus.knot_core import (
    canonical_entries,
    canonicalize,
    complexity,
    connected_sum,
    crossing_bounds,
    format_word,
    is_alternating_diagram,
    is_amphichiral_class,
    mirror,
    mirror_class,
    negate_reverse,
    parse_word,
    seifert_genus,
    sum_genus,
    writhe,
)
from bridgegenus.models import ConnectedSum, TwistWord

nonzero = st.integers(min_value=-9, max_value=9).filter(lambda a: a != 0)
words = st.integers(min_value=1, max_value=5).flatmap(
    lambda m: st.lists(nonzero, min_size=2 * m, max_size=2 * m)
).map(lambda e: TwistWord(entries=tuple(e)))


def w(*entries: int) -> TwistWord:
    return TwistWord.of(*entries)


class TestInvariants:
    def test_complexity(self):
        assert complexity(w(1, 1)) == 2
        assert complexity(w(-1, -1, 2, -1)) == 5
        assert complexity(w(1, -1, 2, -1)) == 5

    def test_seifert_genus(self):
        assert seifert_genus(w(1, 1)) == 1
        assert seifert_genus(w(1, -1)) == 1
        assert seifert_genus(w(-1, -1, 2, -1)) == 2

    def test_crossing_bounds(self):
        assert crossing_bounds(w(1, -1)) == (3, 4)
        assert crossing_bounds(w(1, 1)) == (3, 4)
        assert crossing_bounds(w(-1, -1, 2, -1)) == (6, 10)

    def test_writhe_of_mirror_is_negated(self):
        word = w(1, -1, 2, -1)
        assert writhe(mirror(word)) == -writhe(word)

    def test_alternating_diagram(self):
        assert is_alternating_diagram(w(1, 2))
        assert is_alternating_diagram(w(-1, -3))
        assert not is_alternating_diagram(w(1, -1))


class TestCanonicalize:
    def test_examples(self):
        assert canonicalize(w(1, 1)).canonical_word == w(-1, -1)
        assert canonicalize(w(1, -1)).canonical_word == w(1, -1)
        assert canonicalize(w(1, -1, 2, -1)).canonical_word == w(1, -2, 1, -1)

    def test_negate_reverse(self):
        assert negate_reverse(w(1, 1)) == w(-1, -1)
        assert negate_reverse(w(1, -1, 2, -1)) == w(1, -2, 1, -1)

    def test_mirror(self):
        assert mirror(w(1, 1)) == w(-1, -1)
        assert mirror(w(1, -1)) == w(-1, 1)

    def test_figure_eight_is_amphichiral(self):
        assert is_amphichiral_class(canonicalize(w(1, 1)))

    def test_trefoil_is_chiral(self):
        c = canonicalize(w(1, -1))
        assert not is_amphichiral_class(c)
        assert mirror_class(c).canonical_word == w(-1, 1)

    @given(words)
    def test_idempotent_and_symmetric(self, word):
        c = canonicalize(word)
        assert canonicalize(c.canonical_word) == c
        assert canonicalize(negate_reverse(word)) == c

    @given(words)
    def test_mirror_class_is_involution(self, word):
        c = canonicalize(word)
        assert mirror_class(mirror_class(c)) == c

    @given(words)
    def test_mirror_commutes_with_negate_reverse(self, word):
        assert mirror(negate_reverse(word)) == negate_reverse(mirror(word))
        assert mirror(mirror(word)) == word
        assert negate_reverse(negate_reverse(word)) == word

    @given(words)
    def test_mirror_descends_to_classes(self, word):
        assert mirror_class(canonicalize(word)) == canonicalize(mirror(word))

    @given(words)
    def test_complexity_at_least_twice_genus(self, word):
        assert complexity(word) >= 2 * seifert_genus(word)

    @given(words)
    def test_canonical_entries_is_lexmin(self, word):
        e = canonical_entries(word.entries)
        assert e == min(word.entries, negate_reverse(word).entries)


class TestConnectedSum:
    def test_genus_is_additive(self):
        assert sum_genus(ConnectedSum()) == 0
        assert sum_genus(connected_sum([w(1, 1)])) == 1
        assert sum_genus(connected_sum([w(1, 1), w(1, -1), w(1, -1)])) == 3

    def test_order_does_not_matter(self):
        a = connected_sum([w(1, 1), w(1, -1), w(2, -3, 1, 1)])
        b = connected_sum([w(2, -3, 1, 1), w(1, -1), w(-1, -1)])
        assert a == b


class TestParseWord:
    def test_roundtrip(self):
        assert parse_word("1,-1,2,-1") == w(1, -1, 2, -1)
        assert format_word(parse_word(" 3, -2 ")) == "3,-2"

    def test_zero_entry_named(self):
        with pytest.raises(WordParseError) as exc:
            parse_word("1,0,1,1")
        assert exc.value.token == "0"
        assert exc.value.position == 2
        assert "position 2" in str(exc.value)

    def test_bad_token(self):
        with pytest.raises(WordParseError) as exc:
            parse_word("1,x")
        assert exc.value.token == "x"

    def test_odd_length(self):
        with pytest.raises(WordParseError, match="odd"):
            parse_word("1,2,3")

    def test_empty(self):
        with pytest.raises(WordParseError, match="empty"):
            parse_word("  ")

    def test_model_rejects_zero(self):
        with pytest.raises(ValueError):
            TwistWord.of(1, 0)
