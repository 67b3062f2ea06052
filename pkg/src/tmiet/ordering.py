"""Lexicographic structure of a subshift: cylinder endpoints and consecutivity.

Everything here is certified only up to a finite depth: a pair of infinite
words is represented by their depth-``d`` prefixes and statements are
checked for every shorter length.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Union

from .language import FactorTable, NotAFactorError, SpecialBranch, TableDepthError
from .substitution import fixed_point_prefix
from .words import common_prefix_length, format_word


class Direction(enum.Enum):
    MIN = "min"
    MAX = "max"


class Verdict(enum.Enum):
    CONSECUTIVE_TO_DEPTH = "ConsecutiveToDepth"
    NOT_CONSECUTIVE = "NotConsecutive"
    UNKNOWN = "Unknown"


class Approach(enum.Enum):
    BOTH_SIDES = "BothSides"
    LEFT_ONLY = "LeftOnly"
    RIGHT_ONLY = "RightOnly"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Extended:
    """The word ``letter . w_seed``: a left extension of a fixed point."""

    letter: int
    seed: int


# a word given explicitly, a fixed-point seed letter, a traced branch or a left extension
WordSpec = Union[bytes, int, SpecialBranch, Extended, "CylinderEndpoint"]


@dataclass(frozen=True)
class CylinderEndpoint:
    base: bytes
    direction: Direction
    prefix: bytes


@dataclass(frozen=True)
class ConsecutivityVerdict:
    pair: tuple[bytes, bytes]
    verdict: Verdict
    certified_depth: int
    witness: bytes | None = None

    def to_json(self, m: int) -> dict:
        out = {"pair": [format_word(w, m) for w in self.pair],
               "verdict": self.verdict.value,
               "certified_depth": self.certified_depth}
        if self.witness is not None:
            out["witness"] = format_word(self.witness, m)
        return out


def resolve(t: FactorTable, spec: WordSpec, depth: int) -> bytes:
    """Depth-``depth`` prefix described by ``spec``, checked to be a factor."""
    if isinstance(spec, bool):
        raise TypeError("booleans are not word descriptors")
    if isinstance(spec, int):
        word = fixed_point_prefix(t.substitution, spec, depth)
    elif isinstance(spec, Extended):
        word = bytes([spec.letter]) + fixed_point_prefix(t.substitution, spec.seed, depth - 1) \
            if depth > 1 else bytes([spec.letter])
    elif isinstance(spec, SpecialBranch):
        word = spec.prefix
    elif isinstance(spec, CylinderEndpoint):
        word = spec.prefix
    else:
        word = bytes(spec)
    if len(word) < depth:
        raise TableDepthError(f"descriptor resolves to {len(word)} letters, need {depth}")
    word = word[:depth]
    return t.require(word)


def cylinder_endpoint(t: FactorTable, v: bytes, direction: Direction,
                      depth: int) -> CylinderEndpoint:
    """Prefix of the smallest (``MIN``) or greatest (``MAX``) word of ``Cyl(v)``."""
    if depth > t.max_len:
        raise TableDepthError(f"depth {depth} exceeds table depth {t.max_len}")
    t.require(v)
    letters = range(t.m) if direction is Direction.MIN else range(t.m - 1, -1, -1)
    word = v
    while len(word) < depth:
        for b in letters:
            candidate = word + bytes([b])
            if candidate in t:
                word = candidate
                break
        else:
            raise NotAFactorError(f"{format_word(word, t.m)} has no right extension")
    return CylinderEndpoint(v, direction, word)


def check_consecutive(t: FactorTable, lower: WordSpec, upper: WordSpec,
                      depth: int) -> ConsecutivityVerdict:
    """Decide, up to ``depth``, whether no word of the language lies strictly between.

    For every length ``d`` beyond the common prefix, the length-``d``
    factors between the two prefixes are counted.  Three or more gives a
    witness; exactly two at every length, with the lower word being the
    greedy maximum and the upper the greedy minimum of their distinguishing
    cylinders, certifies consecutivity to ``depth``.
    """
    w = resolve(t, lower, depth)
    w2 = resolve(t, upper, depth)
    if not w < w2:
        raise ValueError("descriptors must resolve to prefixes with lower < upper")
    c = common_prefix_length(w, w2)
    if c == depth:
        return ConsecutivityVerdict((w, w2), Verdict.UNKNOWN, 0)
    for d in range(c + 1, depth + 1):
        lo, hi = w[:d], w2[:d]
        if t.count_between(lo, hi) >= 3:
            witness = next(u for u in t.factors_between(lo, hi) if u != lo and u != hi)
            return ConsecutivityVerdict((w, w2), Verdict.NOT_CONSECUTIVE, d, witness)
    is_max = cylinder_endpoint(t, w[:c + 1], Direction.MAX, depth).prefix == w
    is_min = cylinder_endpoint(t, w2[:c + 1], Direction.MIN, depth).prefix == w2
    if is_max and is_min:
        return ConsecutivityVerdict((w, w2), Verdict.CONSECUTIVE_TO_DEPTH, depth)
    return ConsecutivityVerdict((w, w2), Verdict.UNKNOWN, depth)


def approach_lengths(t: FactorTable, word: bytes) -> tuple[list[int], list[int]]:
    """Lengths ``d`` at which another factor branches off ``word`` below / above.

    At length ``d`` the prefix ``word[:d]`` has a right extension smaller
    (resp. greater) than the continuation letter ``word[d]``, so some word
    of the language agrees with ``word`` on ``d`` letters and is smaller
    (resp. greater).
    """
    below, above = [], []
    for d in range(1, len(word)):
        nxt = word[d]
        rext = t.rext(word[:d])
        if len(rext) < 2:
            continue
        if min(rext) < nxt:
            below.append(d)
        if max(rext) > nxt:
            above.append(d)
    return below, above


def two_sided_approach(t: FactorTable, branch: WordSpec, depth: int,
                       min_witnesses: int = 2) -> Approach:
    """Whether words of the language accumulate on the branch from both sides.

    A side counts as approaching when at least ``min_witnesses`` distinct
    branching-off lengths ``d >= 2`` are found on it, the finite stand-in for
    "infinitely many".  Length 1 is ignored: every word is trivially
    separated from the other first-letter cylinders there.  Branching-off
    lengths of left extensions of fixed points recur geometrically (ratio
    ``2**m`` for the Thue-Morse family), so large ``m`` needs a large depth.
    """
    if depth + 1 > t.max_len:
        raise TableDepthError(f"approach analysis to depth {depth} needs table depth "
                              f"{depth + 1}, have {t.max_len}")
    word = resolve(t, branch, depth)
    below, above = approach_lengths(t, word)
    from_below = sum(d >= 2 for d in below) >= min_witnesses
    from_above = sum(d >= 2 for d in above) >= min_witnesses
    if from_below and from_above:
        return Approach.BOTH_SIDES
    if from_below:
        return Approach.LEFT_ONLY
    if from_above:
        return Approach.RIGHT_ONLY
    return Approach.UNKNOWN
