from functools import lru_cache

import pytest

from tmiet.language import build_factor_table
from tmiet.measure import estimate_frequencies
from tmiet.substitution import thue_morse_substitution

WINDOW = 1 << 22


@lru_cache(maxsize=None)
def tm_table(m: int, max_len: int):
    return build_factor_table(thue_morse_substitution(m), max_len)


@lru_cache(maxsize=None)
def tm_measure(m: int, resolution: int, window: int = WINDOW):
    return estimate_frequencies(tm_table(m, resolution + 2), resolution, window)


def digit_sum_sequence(m: int, length: int) -> bytes:
    """Independent oracle: letter i is the number of ones in binary i, mod m."""
    return bytes(bin(i).count("1") % m for i in range(length))


@lru_cache(maxsize=None)
def oracle_factors(m: int, n: int, length: int = 1 << 16) -> frozenset:
    w = digit_sum_sequence(m, length)
    return frozenset(w[i:i + n] for i in range(len(w) - n + 1))


@pytest.fixture(scope="session")
def tables():
    return tm_table


@pytest.fixture(scope="session")
def measures():
    return tm_measure
