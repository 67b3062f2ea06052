"""Ordered alphabets and finite words.

Letters of an alphabet of size ``m`` are the integers ``0..m-1`` and a
word is a ``bytes`` object holding them.  With this encoding the
built-in ``bytes`` comparison *is* the lexicographic order induced by the
alphabet order (a strict prefix sorts before its extensions), and
slicing, hashing and sorting come for free.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

MAX_ALPHABET = 255


class Ordering(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


@dataclass(frozen=True)
class OrderedAlphabet:
    """A finite totally ordered alphabet.

    ``letters`` are display labels listed in increasing order; internally
    the letter at position ``i`` is the integer ``i``.
    """

    letters: tuple

    def __post_init__(self):
        if not self.letters:
            raise ValueError("alphabet must contain at least one letter")
        if len(set(self.letters)) != len(self.letters):
            raise ValueError(f"alphabet letters are not distinct: {self.letters!r}")
        if len(self.letters) > MAX_ALPHABET:
            raise ValueError(f"alphabets larger than {MAX_ALPHABET} letters are not supported")

    @classmethod
    def of_size(cls, m: int) -> "OrderedAlphabet":
        """The alphabet Z_m = {0, ..., m-1} with its natural order."""
        if m < 1:
            raise ValueError(f"alphabet size must be positive, got {m}")
        return cls(tuple(range(m)))

    @property
    def size(self) -> int:
        return len(self.letters)

    def __len__(self):
        return len(self.letters)

    def __contains__(self, word) -> bool:
        return all(0 <= c < self.size for c in word)

    def check(self, word: bytes) -> bytes:
        """Return ``word`` unchanged, raising if a symbol is outside the alphabet."""
        for c in word:
            if c >= self.size:
                raise ValueError(f"symbol {c} is not a letter of an alphabet of size {self.size}")
        return word


def as_word(symbols: Iterable[int] | bytes) -> bytes:
    if isinstance(symbols, bytes):
        return symbols
    return bytes(symbols)


def lex_compare(w1: bytes, w2: bytes, alphabet: OrderedAlphabet | None = None) -> Ordering:
    """Lexicographic comparison; a strict prefix is smaller than its extensions.

    When ``alphabet`` is given, both words are checked against it and a
    ``ValueError`` is raised if either uses a foreign symbol.
    """
    if alphabet is not None:
        alphabet.check(w1)
        alphabet.check(w2)
    if w1 == w2:
        return Ordering.EQUAL
    return Ordering.LESS if w1 < w2 else Ordering.GREATER


def factors_of(w: bytes, n: int) -> set[bytes]:
    """All distinct length-``n`` factors of ``w``."""
    if n < 1:
        raise ValueError(f"factor length must be positive, got {n}")
    return {w[i:i + n] for i in range(len(w) - n + 1)}


def common_prefix_length(w1: bytes, w2: bytes) -> int:
    k = min(len(w1), len(w2))
    if w1[:k] == w2[:k]:
        return k
    lo, hi = 0, k
    # invariant: prefixes of length lo agree, prefixes of length hi differ
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if w1[:mid] == w2[:mid]:
            lo = mid
        else:
            hi = mid
    return lo


def successor_bound(w: bytes) -> bytes:
    """Smallest word greater than every word having ``w`` as a prefix."""
    if not w:
        raise ValueError("the empty word has no successor bound")
    return w[:-1] + bytes([w[-1] + 1])


def format_word(w: bytes, m: int) -> str:
    """Digit string for alphabets of size <= 10, comma-separated integers otherwise."""
    if m <= 10:
        return "".join(map(str, w))
    return ",".join(map(str, w))


def parse_word(text: str, m: int) -> bytes:
    text = text.strip()
    if not text:
        return b""
    if m <= 10 and "," not in text:
        symbols = [int(ch) for ch in text]
    else:
        symbols = [int(tok) for tok in text.split(",")]
    word = bytes(symbols)
    OrderedAlphabet.of_size(m).check(word)
    return word


def is_sorted_strictly(words: Sequence[bytes]) -> bool:
    return all(a < b for a, b in zip(words, words[1:]))
