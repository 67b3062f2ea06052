"""Empirical factor frequencies and the cylinder valuation map.

The subshift of a primitive substitution is uniquely ergodic, so the
frequency of a factor in a long fixed-point prefix converges to the
measure of its cylinder.  All geometry built on top of this module
inherits double precision and the estimation error of the window.
"""

from __future__ import annotations

import logging
import os
from bisect import bisect_left
from dataclasses import dataclass

import numpy as np

from .language import FactorTable, NotAFactorError, TableDepthError, _lcp_array
from .substitution import fixed_point_prefix
from .words import format_word

logger = logging.getLogger(__name__)

DEFAULT_WINDOW = 1 << 22
DEFAULT_EPS_FREQ = 1e-3
WINDOW_ENV = "TMIET_WINDOW"


def default_window() -> int:
    value = os.environ.get(WINDOW_ENV)
    if value:
        try:
            window = int(value)
        except ValueError:
            raise ValueError(f"{WINDOW_ENV} must be an integer, got {value!r}") from None
        if window < 1:
            raise ValueError(f"{WINDOW_ENV} must be positive, got {window}")
        return window
    return DEFAULT_WINDOW


@dataclass(frozen=True)
class ValuationPoint:
    """Bracket ``[lower, upper]`` containing the valuation of every word with this prefix."""

    word_prefix: bytes
    lower: float
    upper: float

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lower + self.upper)

    @property
    def half_width(self) -> float:
        return 0.5 * (self.upper - self.lower)


class FrequencyMeasure:
    """Occurrence frequencies of every factor of length ``<= resolution``.

    ``frequencies(n)[i]`` is the frequency of ``table.factors(n)[i]``.
    """

    def __init__(self, table: FactorTable, window_len: int, resolution: int,
                 freqs: dict[int, np.ndarray]):
        self.table = table
        self.window_len = window_len
        self.resolution = resolution
        self._freqs = freqs
        self._lower = {n: np.concatenate(([0.0], np.cumsum(f)[:-1])) for n, f in freqs.items()}

    def __repr__(self):
        return (f"FrequencyMeasure({self.table.substitution.describe()!r}, "
                f"resolution={self.resolution}, window={self.window_len})")

    def _check(self, n: int):
        if not 1 <= n <= self.resolution:
            raise TableDepthError(f"factor length {n} is outside the measured range "
                                  f"1..{self.resolution}")

    def frequencies(self, n: int) -> np.ndarray:
        self._check(n)
        return self._freqs[n]

    def lower_bounds(self, n: int) -> np.ndarray:
        self._check(n)
        return self._lower[n]

    def freq(self, v: bytes) -> float:
        self._check(len(v))
        return float(self._freqs[len(v)][self.table.index(v)])

    def items(self, n: int):
        return zip(self.table.factors(n), self.frequencies(n))


def _rank_windows(word: bytes, index: dict[bytes, int], n: int, count: int) -> np.ndarray:
    try:
        return np.fromiter((index[word[i:i + n]] for i in range(count)),
                           dtype=np.int64, count=count)
    except KeyError:
        raise NotAFactorError("the sampled window contains a factor missing from the table; "
                              "the table did not stabilize") from None


def estimate_frequencies(t: FactorTable, resolution: int,
                         window_len: int | None = None) -> FrequencyMeasure:
    """Count every factor of length ``<= resolution`` in a fixed-point prefix.

    The count of a length-``n`` factor is divided by ``window_len - n + 1``.
    Length-``resolution`` windows are located once; shorter factors are
    obtained by grouping those counts along the sorted order, plus the few
    windows at the very end that are too short for the full resolution.
    """
    if window_len is None:
        window_len = default_window()
    if not 1 <= resolution <= t.max_len:
        raise TableDepthError(f"resolution {resolution} is outside the table range "
                              f"1..{t.max_len}")
    if window_len < resolution:
        raise ValueError(f"window of {window_len} letters is shorter than the "
                         f"resolution {resolution}")
    if window_len < 100 * 2 ** min(resolution, 40):
        logger.info("window %d is below the recommended floor 100 * 2**%d",
                    window_len, resolution)
    word = fixed_point_prefix(t.substitution, t.seed, window_len)
    top = t.factors(resolution)
    full = window_len - resolution + 1
    ranks = _rank_windows(word, {u: i for i, u in enumerate(top)}, resolution, full)
    top_counts = np.bincount(ranks, minlength=len(top))
    lcp = _lcp_array(top, resolution)
    freqs = {}
    for n in range(1, resolution + 1):
        starts = np.flatnonzero(lcp < n)
        counts = np.add.reduceat(top_counts, starts)
        if len(counts) != t.complexity(n):
            raise NotAFactorError(f"length-{n} factor sets disagree with the table")
        for i in range(full, window_len - n + 1):
            counts[t.index(word[i:i + n])] += 1
        if not counts.all():
            missing = t.factors(n)[int(np.flatnonzero(counts == 0)[0])]
            raise ValueError(f"factor {format_word(missing, t.m)} never occurs in a window of "
                             f"{window_len} letters; increase the window")
        freqs[n] = counts / float(window_len - n + 1)
    return FrequencyMeasure(t, window_len, resolution, freqs)


def cylinder_measure(f: FrequencyMeasure, v: bytes) -> float:
    """Estimated measure of the cylinder of the factor ``v``."""
    return f.freq(v)


def phi_mu_bracket(f: FrequencyMeasure, w_prefix: bytes) -> ValuationPoint:
    """Bracket of the valuation of every word starting with ``w_prefix``."""
    n = len(w_prefix)
    f._check(n)
    i = f.table.index(w_prefix)
    lower = float(f.lower_bounds(n)[i])
    return ValuationPoint(w_prefix, lower, lower + float(f.frequencies(n)[i]))


def refinement_residual(f: FrequencyMeasure, n: int) -> float:
    """``max_v |freq(v) - sum_b freq(vb)|`` over ``v`` in ``Fact(n)``, ``n < resolution``."""
    t = f.table
    parent = np.searchsorted(t.starts(n), t.starts(n + 1), side="right") - 1
    sums = np.bincount(parent, weights=f.frequencies(n + 1), minlength=t.complexity(n))
    return float(np.abs(sums - f.frequencies(n)).max())


def invariance_residual(f: FrequencyMeasure, n: int) -> float:
    """``max_v |freq(v) - sum_a freq(av)|``: shift invariance at length ``n``."""
    t = f.table
    factors_n = t.factors(n)
    suffix = np.fromiter((bisect_left(factors_n, u[1:]) for u in t.factors(n + 1)),
                         dtype=np.int64, count=t.complexity(n + 1))
    sums = np.bincount(suffix, weights=f.frequencies(n + 1), minlength=t.complexity(n))
    return float(np.abs(sums - f.frequencies(n)).max())


def total_mass(f: FrequencyMeasure, n: int) -> float:
    return float(f.frequencies(n).sum())
