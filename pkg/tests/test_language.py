import pytest
from hypothesis import given, settings, strategies as st

from tmiet.language import (NotAFactorError, SpecialKind, TableDepthError, build_factor_table,
                            complexity, extension_profile, extension_profiles, special_factors,
                            trace_special_branches, two_letter_factors)
from tmiet.substitution import fixed_point_prefix, parse_substitution, thue_morse_substitution
from tmiet.words import parse_word

from conftest import oracle_factors, tm_table

# p(1..12) counted by brute force over 2^16 (m=2), 2^18 (m=3) and 2^20 (m=4)
# letters of the digit-sum sequence
COMPLEXITY = {
    2: [2, 4, 6, 10, 12, 16, 20, 22, 24, 28, 32, 36],
    3: [3, 9, 15, 24, 30, 39, 48, 54, 60, 69, 78, 87],
    4: [4, 16, 28, 44, 56, 72, 88, 100, 112, 128, 144, 160],
}


def w(text):
    return parse_word(text, 10)


@pytest.mark.parametrize("m", [2, 3, 4])
def test_complexity_matches_frozen_oracle(m):
    t = tm_table(m, 12)
    assert [complexity(t, n) for n in range(1, 13)] == COMPLEXITY[m]


@pytest.mark.parametrize("m,n", [(2, 5), (2, 12), (3, 7)])
def test_factor_sets_match_digit_sum_oracle(m, n):
    length = 1 << 16 if m == 2 else 1 << 18
    assert set(tm_table(m, 12).factors(n)) == oracle_factors(m, n, length)


def test_small_examples():
    t = tm_table(2, 3)
    assert t.factors(1) == [w("0"), w("1")]
    assert t.factors(3) == [w(x) for x in ("001", "010", "011", "100", "101", "110")]
    assert complexity(t, 3) == 6
    assert len(tm_table(3, 2).factors(2)) == 9
    assert complexity(tm_table(3, 2), 1) == 3


def test_two_letter_closure():
    assert two_letter_factors(thue_morse_substitution(3)) == set(tm_table(3, 2).factors(2))
    assert len(two_letter_factors(thue_morse_substitution(15))) == 225


@pytest.mark.parametrize("m,n", [(2, 30), (3, 41), (5, 60)])
def test_prefix_and_closure_methods_agree(m, n):
    s = thue_morse_substitution(m)
    by_prefix = build_factor_table(s, n)
    by_closure = build_factor_table(s, n, prefix_budget=1)
    assert by_prefix.method == "prefix" and by_closure.method == "closure"
    assert by_prefix.top == by_closure.top


def test_large_alphabet_falls_back_to_closure():
    t = build_factor_table(thue_morse_substitution(15), 20)
    assert t.method == "closure"
    assert complexity(t, 2) == 225


def test_stabilization_record():
    t = tm_table(3, 40)
    assert t.prefix_len >= 4 * 40
    assert set(t.stabilization_generation) == set(range(1, 41))
    # longer factors never stabilize earlier than shorter ones
    gens = [t.stabilization_generation[n] for n in range(1, 41)]
    assert gens == sorted(gens)


def test_other_substitution():
    fib = parse_substitution("0:01,1:0")
    t = build_factor_table(fib, 10)
    assert [complexity(t, n) for n in range(1, 11)] == list(range(2, 12))  # Sturmian


def test_table_errors():
    with pytest.raises(ValueError):
        build_factor_table(parse_substitution("0:00,1:11"), 5)
    with pytest.raises(ValueError):
        build_factor_table(parse_substitution("0:10,1:01"), 5)
    with pytest.raises(ValueError):
        build_factor_table(thue_morse_substitution(2), 0)
    t = tm_table(2, 5)
    with pytest.raises(TableDepthError):
        complexity(t, 6)
    with pytest.raises(TableDepthError):
        w("000000") in t
    with pytest.raises(NotAFactorError):
        t.require(w("000"))


@pytest.mark.parametrize("m", [2, 3, 4])
def test_factorial_closure_and_prolongability(m):
    t = tm_table(m, 16)
    for n in range(2, 17):
        shorter = set(t.factors(n - 1))
        for v in t.factors(n):
            assert v[1:] in shorter and v[:-1] in shorter
    for n in range(1, 15):
        for p in extension_profiles(t, n):
            assert p.lext and p.rext


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_complexity_growth(m):
    t = tm_table(m, 160)
    p = [None] + [complexity(t, n) for n in range(1, 161)]
    assert all(p[n] <= p[n + 1] <= m * p[n] for n in range(1, 160))
    ratios = [(p[2 * n] - p[n]) / n for n in range(4, 81)]
    assert max(ratios) <= 2 * m * m


@pytest.mark.parametrize("m", [2, 3])
def test_extensions_match_oracle(m):
    t = tm_table(m, 10)
    ext = oracle_factors(m, 8)
    for v in t.factors(6):
        assert t.lext(v) == {u[0] for u in oracle_factors(m, 7) if u[1:] == v}
        assert t.rext(v) == {u[-1] for u in oracle_factors(m, 7) if u[:-1] == v}
        assert t.biext(v) == {(u[0], u[-1]) for u in ext if u[1:-1] == v}


def test_profile_examples():
    t = tm_table(3, 10)
    assert len(extension_profile(t, w("0")).biext) == 5
    assert len(extension_profile(t, w("01")).biext) == 6
    assert len(extension_profile(t, w("012")).biext) == 2
    with pytest.raises(NotAFactorError):
        extension_profile(t, w("000"))
    with pytest.raises(TableDepthError):
        extension_profile(t, t.factors(9)[0])


def test_special_factor_examples():
    t2 = tm_table(2, 5)
    assert [p.factor for p in special_factors(t2, 1, SpecialKind.BI)] == [w("0"), w("1")]
    t3 = tm_table(3, 6)
    assert [p.factor for p in special_factors(t3, 2, SpecialKind.BI)] == \
        [w("01"), w("12"), w("20")]
    left = {p.factor for p in special_factors(t3, 2, SpecialKind.LEFT)}
    assert {w("01"), w("12"), w("20")} <= left
    assert all(len(t3.lext(v)) > 1 for v in left)


@given(st.integers(2, 4), st.integers(1, 12), st.data())
@settings(max_examples=60, deadline=None)
def test_biext_dominates_lext_rext(m, n, data):
    t = tm_table(m, 14)
    v = data.draw(st.sampled_from(t.factors(n)))
    p = extension_profile(t, v)
    if p.bispecial:
        assert len(p.biext) >= max(len(p.lext), len(p.rext))
    for a in p.lext:
        assert bytes([a]) + v in t
    for b in p.rext:
        assert v + bytes([b]) in t


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_branches_are_fixed_points(m):
    s = thue_morse_substitution(m)
    branches = trace_special_branches(tm_table(m, 121), 60)
    assert [b.prefix for b in branches] == [fixed_point_prefix(s, k, 60) for k in range(m)]
    assert [b.seed for b in branches] == list(range(m))
    assert all(len(b.lext_letters) == m and b.depth == 60 for b in branches)
    for b in branches:
        assert all(t_ls for t_ls in (tm_table(m, 121).is_left_special(b.prefix[:d])
                                     for d in range(1, 61)))


def test_reference_branch_prefixes():
    got3 = [b.prefix for b in trace_special_branches(tm_table(3, 70), 31)]
    assert got3 == [w("0112122012202001122020012001011"),
                    w("1220200120010112200101120112122"),
                    w("2001011201121220011212201220200")]
    got2 = [b.prefix for b in trace_special_branches(tm_table(2, 40), 8)]
    assert got2 == [w("01101001"), w("10010110")]


def test_trace_requires_lookahead():
    with pytest.raises(TableDepthError):
        trace_special_branches(tm_table(3, 40), 30)
    with pytest.raises(ValueError):
        trace_special_branches(tm_table(3, 40), 0)
