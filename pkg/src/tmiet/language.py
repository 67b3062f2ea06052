"""Factor languages of substitution subshifts, extension sets and special factors.

A :class:`FactorTable` keeps only the lexicographically sorted set of
longest factors together with the longest-common-prefix (LCP) array of
adjacent entries.  Every shorter factor set is recovered from it: the
length-``n`` factors are the distinct length-``n`` prefixes of the
longest ones (the language is right-prolongable), and a new prefix starts
exactly where the LCP with the previous entry drops below ``n``.
"""

from __future__ import annotations

import enum
import logging
from bisect import bisect_left
from dataclasses import dataclass

import numpy as np

from .substitution import (Substitution, fixed_point_prefix, fixed_point_seeds,
                           is_primitive)
from .words import format_word, successor_bound

logger = logging.getLogger(__name__)

MAX_PREFIX_LEN = 1 << 27


class TableDepthError(ValueError):
    """The factor table is too shallow for the requested operation."""


class NotAFactorError(ValueError):
    """A word that was required to be a factor of the language is not one."""


def _lcp_array(sorted_words: list[bytes], width: int) -> np.ndarray:
    """``lcp[i]`` = common prefix length of entries ``i-1`` and ``i``; ``lcp[0] = -1``."""
    out = np.full(len(sorted_words), -1, dtype=np.int64)
    if len(sorted_words) > 1:
        arr = np.frombuffer(b"".join(sorted_words), dtype=np.uint8).reshape(-1, width)
        neq = arr[1:] != arr[:-1]
        out[1:] = neq.argmax(axis=1)
    return out


class FactorTable:
    """Stabilized factor sets ``Fact_L(n)`` for ``n <= max_len``."""

    def __init__(self, substitution: Substitution, max_len: int, top: list[bytes],
                 seed: int, prefix_len: int | None, stabilization_generation: dict[int, int],
                 method: str = "prefix"):
        self.substitution = substitution
        self.method = method
        self.max_len = max_len
        self.top = top
        self.lcp = _lcp_array(top, max_len)
        self.seed = seed
        self.prefix_len = prefix_len
        self.stabilization_generation = stabilization_generation
        self._starts: dict[int, np.ndarray] = {}
        self._factors: dict[int, list[bytes]] = {}

    def __repr__(self):
        return (f"FactorTable({self.substitution.describe()!r}, max_len={self.max_len}, "
                f"p(max_len)={len(self.top)})")

    @property
    def m(self) -> int:
        return self.substitution.m

    def _check_len(self, n: int):
        if not 0 <= n <= self.max_len:
            raise TableDepthError(f"length {n} is outside the table range 0..{self.max_len}")

    def starts(self, n: int) -> np.ndarray:
        """Indices into ``top`` where a new length-``n`` prefix begins."""
        self._check_len(n)
        st = self._starts.get(n)
        if st is None:
            st = np.flatnonzero(self.lcp < n)
            self._starts[n] = st
        return st

    def factors(self, n: int) -> list[bytes]:
        """The sorted list ``Fact_L(n)``."""
        fs = self._factors.get(n)
        if fs is None:
            top = self.top
            fs = [top[i][:n] for i in self.starts(n)]
            self._factors[n] = fs
        return fs

    def complexity(self, n: int) -> int:
        return len(self.starts(n))

    def __contains__(self, v: bytes) -> bool:
        if len(v) > self.max_len:
            raise TableDepthError(f"word of length {len(v)} exceeds table depth {self.max_len}")
        i = bisect_left(self.top, v)
        return i < len(self.top) and self.top[i].startswith(v)

    def require(self, v: bytes) -> bytes:
        if v not in self:
            raise NotAFactorError(f"{format_word(v, self.m)} is not a factor of the language")
        return v

    def index(self, v: bytes) -> int:
        """Rank of the factor ``v`` inside ``Fact_L(len(v))``."""
        self.require(v)
        i = bisect_left(self.top, v)
        return int(np.searchsorted(self.starts(len(v)), i, side="right")) - 1

    def _block(self, lo: bytes, hi: bytes) -> tuple[int, int]:
        return bisect_left(self.top, lo), bisect_left(self.top, successor_bound(hi))

    def count_between(self, lo: bytes, hi: bytes) -> int:
        """Number of factors ``u`` with ``lo <= u <= hi``; all three of the same length."""
        if len(lo) != len(hi):
            raise ValueError("bounds must have the same length")
        d = len(lo)
        if d == 0:
            return 1
        self._check_len(d)
        i0, i1 = self._block(lo, hi)
        if i1 <= i0:
            return 0
        st = self.starts(d)
        return int(np.searchsorted(st, i1) - np.searchsorted(st, i0))

    def factors_between(self, lo: bytes, hi: bytes) -> list[bytes]:
        d = len(lo)
        i0, i1 = self._block(lo, hi)
        if i1 <= i0:
            return []
        st = self.starts(d)
        a, b = np.searchsorted(st, i0), np.searchsorted(st, i1)
        return [self.top[i][:d] for i in st[a:b]]

    def lext(self, v: bytes) -> frozenset[int]:
        return frozenset(a for a in range(self.m) if bytes([a]) + v in self)

    def rext(self, v: bytes) -> frozenset[int]:
        return frozenset(b for b in range(self.m) if v + bytes([b]) in self)

    def biext(self, v: bytes) -> frozenset[tuple[int, int]]:
        return frozenset((a, b) for a in self.lext(v) for b in range(self.m)
                         if bytes([a]) + v + bytes([b]) in self)

    def is_left_special(self, v: bytes) -> bool:
        count = 0
        for a in range(self.m):
            if bytes([a]) + v in self:
                count += 1
                if count > 1:
                    return True
        return False


def _window_profile(words: set[bytes], width: int) -> tuple[list[bytes], np.ndarray]:
    top = sorted(words)
    lcp = _lcp_array(top, width)
    # p(n) = 1 + #{i >= 1 : lcp[i] < n} for n = 0..width
    hist = np.bincount(lcp[1:], minlength=width + 1)
    counts = 1 + np.concatenate(([0], np.cumsum(hist)[:width]))
    return top, counts


def two_letter_factors(s: Substitution) -> set[bytes]:
    """Exact ``Fact(2)``: two-letter factors of the images, closed under ``s``.

    A two-letter factor of ``s^k(c)`` lies inside one image or straddles the
    images of a two-letter factor of ``s^(k-1)(c)``, so the closure is the
    whole set for a primitive substitution.
    """
    found = {img[i:i + 2] for img in s.images for i in range(len(img) - 1)}
    queue = sorted(found)
    while queue:
        img = s(queue.pop())
        for i in range(len(img) - 1):
            u = img[i:i + 2]
            if u not in found:
                found.add(u)
                queue.append(u)
    return found


def _closure_windows(s: Substitution, n: int) -> tuple[set[bytes], int]:
    """Length-``n`` factors read off ``s^k(ab)`` for every ``ab`` in ``Fact(2)``.

    Once every ``s^k(c)`` has at least ``n - 1`` letters, any length-``n``
    window of a long image meets at most two consecutive letter images.
    """
    pairs = sorted(two_letter_factors(s))
    k = 0
    images = [bytes([c]) for c in range(s.m)]
    while min(map(len, images)) < n - 1:
        images = [s(w) for w in images]
        k += 1
    windows = set()
    for ab in pairs:
        w = images[ab[0]] + images[ab[1]]
        windows.update(w[i:i + n] for i in range(len(w) - n + 1))
    if n == 1:
        windows = {bytes([c]) for c in range(s.m)}
    return windows, k


def build_factor_table(s: Substitution, max_len: int, seed: int | None = None,
                       prefix_budget: int = 1 << 22) -> FactorTable:
    """Factor sets of the subshift of a primitive substitution up to ``max_len``.

    Windows of length ``max_len`` are collected from fixed-point prefixes of
    doubling length, starting at ``max(4 * max_len, 1024)``; the set is
    accepted once a doubling adds nothing.  Languages whose rare factors
    first occur beyond ``prefix_budget`` letters (large alphabets) are
    enumerated instead from the images of the two-letter factors, which is
    exact; the table then records ``method == "closure"``.
    """
    if max_len < 1:
        raise ValueError(f"max_len must be positive, got {max_len}")
    if not is_primitive(s):
        raise ValueError(f"substitution {s.describe()} is not primitive")
    seeds = fixed_point_seeds(s)
    if not seeds:
        raise ValueError(f"substitution {s.describe()} has no prolongable letter")
    if seed is None:
        seed = min(seeds)
    elif seed not in seeds:
        raise ValueError(f"letter {seed} is not a fixed-point seed of {s.describe()}")
    n = max_len
    length = max(4 * n, 1024)
    prefix = fixed_point_prefix(s, seed, length)
    windows = {prefix[i:i + n] for i in range(length - n + 1)}
    done = length - n + 1
    history = [_window_profile(windows, n)[1]]
    while True:
        if 2 * length > min(prefix_budget, MAX_PREFIX_LEN):
            logger.info("factors of %s up to %d not stable within %d letters; "
                        "enumerating from two-letter factors", s.describe(), n, length)
            windows, k = _closure_windows(s, n)
            top, _ = _window_profile(windows, n)
            return FactorTable(s, n, top, seed, None, {j: k for j in range(1, n + 1)},
                               method="closure")
        length *= 2
        prefix = fixed_point_prefix(s, seed, length)
        before = len(windows)
        windows.update(prefix[i:i + n] for i in range(done, length - n + 1))
        done = length - n + 1
        if len(windows) == before:
            break
        history.append(_window_profile(windows, n)[1])
    top, final = _window_profile(windows, n)
    generations = {}
    for k in range(1, n + 1):
        generations[k] = next(g for g, counts in enumerate(history) if counts[k] == final[k])
    logger.debug("factor table %s up to %d stabilized at prefix length %d",
                 s.describe(), n, length // 2)
    return FactorTable(s, n, top, seed, length // 2, generations)


def complexity(t: FactorTable, n: int) -> int:
    """``p_L(n) = #Fact_L(n)``."""
    if n < 1:
        raise TableDepthError(f"complexity needs n >= 1, got {n}")
    return t.complexity(n)


class SpecialKind(enum.Enum):
    LEFT = "left"
    RIGHT = "right"
    BI = "bi"


@dataclass(frozen=True)
class ExtensionProfile:
    factor: bytes
    lext: frozenset[int]
    rext: frozenset[int]
    biext: frozenset[tuple[int, int]]

    @property
    def left_special(self) -> bool:
        return len(self.lext) > 1

    @property
    def right_special(self) -> bool:
        return len(self.rext) > 1

    @property
    def bispecial(self) -> bool:
        return self.left_special and self.right_special

    def matches(self, kind: SpecialKind) -> bool:
        if kind is SpecialKind.LEFT:
            return self.left_special
        if kind is SpecialKind.RIGHT:
            return self.right_special
        return self.bispecial


def extension_profile(t: FactorTable, v: bytes) -> ExtensionProfile:
    if len(v) + 2 > t.max_len:
        raise TableDepthError(f"extension profile of a length-{len(v)} factor needs "
                              f"a table of depth {len(v) + 2}, have {t.max_len}")
    t.require(v)
    return ExtensionProfile(v, t.lext(v), t.rext(v), t.biext(v))


def extension_profiles(t: FactorTable, n: int) -> list[ExtensionProfile]:
    """Profiles of every length-``n`` factor, in lexicographic order."""
    if n + 2 > t.max_len:
        raise TableDepthError(f"profiles of length-{n} factors need a table of depth {n + 2}")
    lext: dict[bytes, set] = {}
    rext: dict[bytes, set] = {}
    biext: dict[bytes, set] = {}
    for u in t.factors(n + 1):
        lext.setdefault(u[1:], set()).add(u[0])
        rext.setdefault(u[:-1], set()).add(u[-1])
    for u in t.factors(n + 2):
        biext.setdefault(u[1:-1], set()).add((u[0], u[-1]))
    return [ExtensionProfile(v, frozenset(lext[v]), frozenset(rext[v]), frozenset(biext[v]))
            for v in t.factors(n)]


def special_factors(t: FactorTable, n: int, kind: SpecialKind) -> list[ExtensionProfile]:
    return [p for p in extension_profiles(t, n) if p.matches(kind)]


@dataclass(frozen=True)
class SpecialBranch:
    """Depth-bounded prefix of an infinite left special word."""

    prefix: bytes
    lext_letters: frozenset[int]
    seed: int | None = None

    @property
    def depth(self) -> int:
        return len(self.prefix)


def _left_special_levels(t: FactorTable, horizon: int) -> list[list[bytes]]:
    """``levels[h]`` = left special factors of length ``h`` reachable by right extension."""
    m = t.m
    level = [bytes([a]) for a in range(m) if t.is_left_special(bytes([a]))]
    levels = [[b""], level]
    for _ in range(1, horizon):
        level = [v + bytes([b]) for v in level for b in range(m)
                 if v + bytes([b]) in t and t.is_left_special(v + bytes([b]))]
        levels.append(level)
    return levels


def trace_special_branches(t: FactorTable, depth: int,
                           horizon: int | None = None) -> list[SpecialBranch]:
    """Depth-``depth`` prefixes of the infinite left special words.

    Left special factors are grown to the right up to ``horizon`` (default
    ``t.max_len - 1``); a depth-``depth`` prefix is kept when it still has a
    left special extension at the horizon.  Finite left special branches
    die out, so the set of kept prefixes shrinks as the horizon grows; the
    call fails unless that set is unchanged over the upper half of
    ``[depth, horizon]`` and the horizon is at least ``2 * depth``.
    """
    if depth < 1:
        raise ValueError(f"depth must be positive, got {depth}")
    if horizon is None:
        horizon = t.max_len - 1
    if depth + 2 > t.max_len or horizon > t.max_len - 1:
        raise TableDepthError(f"tracing to depth {depth} needs a deeper table "
                              f"(max_len={t.max_len})")
    if horizon < 2 * depth:
        raise TableDepthError(f"branch certification to depth {depth} needs a lookahead "
                              f"horizon of at least {2 * depth}, have {horizon}; "
                              f"build the table with max_len >= {2 * depth + 1}")
    levels = _left_special_levels(t, horizon)
    mid = depth + (horizon - depth) // 2
    sizes = {h: len({u[:depth] for u in levels[h]}) for h in range(mid, horizon + 1)}
    if len(set(sizes.values())) != 1:
        raise TableDepthError(f"number of left special branches at depth {depth} is still "
                              f"changing between horizons {mid} and {horizon}: {sizes}")
    prefixes = sorted({u[:depth] for u in levels[horizon]})
    if not prefixes:
        raise TableDepthError("no infinite left special branch survives")
    seeds = fixed_point_seeds(t.substitution)
    branches = []
    for p in prefixes:
        seed = p[0] if p[0] in seeds and fixed_point_prefix(t.substitution, p[0], depth) == p \
            else None
        branches.append(SpecialBranch(p, t.lext(p), seed))
    return branches
