import pytest
from hypothesis import given, strategies as st

from tmiet.words import (OrderedAlphabet, Ordering, common_prefix_length, factors_of,
                         format_word, is_sorted_strictly, lex_compare, parse_word,
                         successor_bound)

words = st.binary(max_size=30).map(lambda b: bytes(c % 4 for c in b))


def test_prefix_sorts_first():
    assert lex_compare(b"\x00\x01", b"\x00\x01\x00") is Ordering.LESS
    assert lex_compare(b"\x01", b"\x00\x02") is Ordering.GREATER
    assert lex_compare(b"", b"") is Ordering.EQUAL


def test_foreign_symbol_rejected():
    with pytest.raises(ValueError):
        lex_compare(b"\x00", b"\x03", OrderedAlphabet.of_size(3))


def test_alphabet_validation():
    with pytest.raises(ValueError):
        OrderedAlphabet(("a", "a"))
    with pytest.raises(ValueError):
        OrderedAlphabet(())
    with pytest.raises(ValueError):
        OrderedAlphabet.of_size(0)
    assert len(OrderedAlphabet.of_size(5)) == 5
    assert b"\x04" in OrderedAlphabet.of_size(5)


@given(words, words)
def test_compare_is_antisymmetric(a, b):
    assert lex_compare(a, b) == -lex_compare(b, a)


@given(words, words, words)
def test_compare_is_transitive(a, b, c):
    a, b, c = sorted((a, b, c))
    assert lex_compare(a, b) <= 0 and lex_compare(b, c) <= 0 and lex_compare(a, c) <= 0


@given(words, words)
def test_common_prefix(a, b):
    k = common_prefix_length(a, b)
    assert a[:k] == b[:k]
    assert k == min(len(a), len(b)) or a[k] != b[k]


@given(words.filter(bool), words)
def test_successor_bound_brackets_cylinder(v, tail):
    assert v <= v + tail < successor_bound(v)


def test_successor_bound_of_empty_word():
    with pytest.raises(ValueError):
        successor_bound(b"")


def test_factors_of():
    assert factors_of(b"\x00\x01\x01\x00", 2) == {b"\x00\x01", b"\x01\x01", b"\x01\x00"}
    assert factors_of(b"\x00", 2) == set()
    with pytest.raises(ValueError):
        factors_of(b"\x00", 0)


@given(st.integers(2, 30).flatmap(
    lambda m: st.tuples(st.just(m), st.lists(st.integers(0, m - 1), max_size=20))))
def test_format_parse_round_trip(case):
    m, letters = case
    w = bytes(letters)
    assert parse_word(format_word(w, m), m) == w


def test_parse_rejects_large_letter():
    with pytest.raises(ValueError):
        parse_word("013", 3)


def test_sorted_strictly():
    assert is_sorted_strictly([b"\x00", b"\x00\x01", b"\x01"])
    assert not is_sorted_strictly([b"\x01", b"\x01"])
