import numpy as np
import pytest

from tmiet.language import NotAFactorError, TableDepthError
from tmiet.measure import (WINDOW_ENV, default_window, estimate_frequencies,
                           invariance_residual, phi_mu_bracket, refinement_residual, total_mass)
from tmiet.words import parse_word

from conftest import digit_sum_sequence, tm_measure, tm_table


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_mass_and_residuals(m):
    f = tm_measure(m, 10)
    for n in range(1, 11):
        assert abs(total_mass(f, n) - 1) <= 1e-3
    for n in range(1, 10):
        assert refinement_residual(f, n) < 1e-3
        assert invariance_residual(f, n) < 1e-3


def test_letter_frequencies():
    assert np.allclose(tm_measure(2, 10).frequencies(1), 0.5, atol=1e-3)
    assert np.allclose(tm_measure(3, 10).frequencies(1), 1 / 3, atol=1e-3)


def test_two_letter_frequencies_thue_morse():
    # 00 and 11 have frequency 1/6, 01 and 10 have 1/3
    assert np.allclose(tm_measure(2, 10).frequencies(2), [1 / 6, 1 / 3, 1 / 3, 1 / 6], atol=1e-3)


def test_counts_match_plain_oracle():
    t = tm_table(3, 8)
    window = 1 << 14
    f = estimate_frequencies(t, 6, window)
    seq = digit_sum_sequence(3, window)
    for n in (1, 4, 6):
        counts = {}
        for i in range(window - n + 1):
            counts[seq[i:i + n]] = counts.get(seq[i:i + n], 0) + 1
        expected = [counts[v] / (window - n + 1) for v in t.factors(n)]
        assert np.allclose(f.frequencies(n), expected, rtol=0, atol=1e-15)


def test_brackets_nest():
    f = tm_measure(3, 10)
    for v in tm_table(3, 12).factors(9):
        outer = phi_mu_bracket(f, v)
        for b in range(3):
            if v + bytes([b]) in tm_table(3, 12):
                inner = phi_mu_bracket(f, v + bytes([b]))
                assert outer.lower - 1e-3 <= inner.lower <= inner.upper <= outer.upper + 1e-3


def test_bracket_of_first_letter():
    br = phi_mu_bracket(tm_measure(2, 10), parse_word("0", 2))
    assert br.lower == 0.0 and abs(br.upper - 0.5) < 1e-3
    assert abs(br.midpoint - 0.25) < 1e-3 and abs(br.half_width - 0.25) < 1e-3


def test_errors():
    t = tm_table(3, 12)
    with pytest.raises(TableDepthError):
        estimate_frequencies(t, 13, 1000)
    with pytest.raises(ValueError):
        estimate_frequencies(t, 10, 5)
    with pytest.raises(ValueError, match="never occurs"):
        estimate_frequencies(t, 10, 200)
    f = tm_measure(3, 10)
    with pytest.raises(TableDepthError):
        f.freq(t.factors(11)[0])
    with pytest.raises(NotAFactorError):
        f.freq(parse_word("000", 3))


def test_window_environment(monkeypatch):
    monkeypatch.delenv(WINDOW_ENV, raising=False)
    assert default_window() == 1 << 22
    monkeypatch.setenv(WINDOW_ENV, "4096")
    assert default_window() == 4096
    monkeypatch.setenv(WINDOW_ENV, "lots")
    with pytest.raises(ValueError):
        default_window()
