from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plclab.surds import RealQuadratic
from plclab.words import (
    ConcatProgram,
    WordSource,
    complexity,
    concat_expand,
    concat_sequence,
    factors,
    fibonacci,
    fibonacci_concat,
    is_primitive,
    prefix,
    recurrence_gap,
    shift,
    source_from_mapping,
    thue_morse,
)


def w(s: str) -> bytes:
    return bytes(int(c) for c in s)


def fib_oracle(n: int) -> bytes:
    """Iterate the morphism 1 -> 12, 2 -> 1 directly."""
    cur = [1]
    while len(cur) < n:
        cur = [y for x in cur for y in ((1, 2) if x == 1 else (1,))]
    return bytes(cur[:n])


def tm_oracle(n: int) -> bytes:
    return bytes(1 + bin(i).count("1") % 2 for i in range(n))


def naive_factors(word: bytes, n: int) -> set:
    return {word[i:i + n] for i in range(len(word) - n + 1)}


def test_periodic_prefix():
    assert prefix(WordSource.periodic("12"), 5) == w("12121")


def test_fibonacci_prefix():
    assert prefix(fibonacci(), 8) == w("12112121")
    assert prefix(fibonacci(), 5000) == fib_oracle(5000)


def test_thue_morse_prefix_matches_bit_parity():
    assert prefix(thue_morse(), 8) == w("12212112")
    assert prefix(thue_morse(), 4096) == tm_oracle(4096)


def test_concat_fibonacci_equals_morphic_fibonacci():
    assert prefix(fibonacci_concat(), 3000) == prefix(fibonacci(), 3000)


def test_concat_recursion_examples():
    prog = ConcatProgram.parse("X1", 2)
    seeds = (w("2"), w("1"))
    s = concat_sequence(prog, seeds, 60)
    assert s[2] == s[1] + s[0]
    assert s[4] == s[3] + s[2]
    assert s[6].startswith(s[5])


def test_concat_rejects_degenerate_seeds():
    with pytest.raises(ValueError):
        WordSource.concat(ConcatProgram.parse("X1", 2), [w("1"), w("1")])
    with pytest.raises(ValueError):
        ConcatProgram.parse("", 2)


@given(st.lists(st.integers(1, 3), min_size=1, max_size=6), st.integers(1, 200), st.integers(0, 50))
@settings(max_examples=100, deadline=None)
def test_prefix_coherence_and_shift(period, L, s):
    src = WordSource.periodic(bytes(period))
    long = prefix(src, L + s + 10)
    assert prefix(src, L) == long[:L]
    assert shift(src, s, L) == long[s:s + L]


@pytest.mark.parametrize("L", [1, 17, 1000])
def test_prefix_coherence_for_morphic(L):
    for src in (fibonacci(), thue_morse()):
        assert prefix(src, L) == prefix(src, 2 * L)[:L]


def test_sturmian_golden_slope_is_a_fibonacci_shift():
    slope = RealQuadratic(3, -1, 2, 5)  # (3 - sqrt5)/2 = 1/phi^2
    src = WordSource.sturmian(slope)
    word = prefix(src, 500)
    for n in range(1, 15):
        assert len(naive_factors(word, n)) == n + 1


def test_sturmian_rational_slope_is_periodic():
    src = WordSource.sturmian(Fraction(2, 5))
    word = prefix(src, 100)
    assert word[:5] * 20 == word


def test_factor_examples():
    assert set(factors(WordSource.periodic("12"), 2, 10).factors) == {w("12"), w("21")}
    assert len(factors(fibonacci(), 3, 200)) == 4
    assert len(factors(thue_morse(), 4, 4096)) == 10


@pytest.mark.parametrize("n", range(1, 13))
def test_fibonacci_complexity_is_n_plus_one(n):
    fs = factors(fibonacci(), n, 2000)
    assert fs.exact
    assert len(fs) == n + 1 == len(naive_factors(fib_oracle(2000), n))


def test_thue_morse_complexity():
    vals = [complexity(thue_morse(), n, 4096) for n in range(1, 5)]
    assert vals == [2, 4, 6, 10]
    assert vals == [len(naive_factors(tm_oracle(4096), n)) for n in range(1, 5)]


def test_periodic_complexity_is_eventually_constant():
    src = WordSource.periodic("1121")
    vals = [complexity(src, n, 200) for n in range(1, 20)]
    assert vals[-1] == 4 and all(v == 4 for v in vals[3:])


def test_exactness_flags():
    assert not factors(WordSource.periodic("12345"), 4, 6).exact
    assert factors(WordSource.periodic("12345"), 4, 8).exact
    assert factors(WordSource.explicit("1212"), 2, 10).exact


def test_recurrence_gaps():
    assert recurrence_gap(WordSource.periodic("12"), "1", 100) == 2
    assert recurrence_gap(thue_morse(), "11", 2**14) == 8
    gap = recurrence_gap(fibonacci(), prefix(fibonacci(), 5), 10**4)
    assert gap is not None and gap <= 13  # F_7
    assert recurrence_gap(WordSource.periodic("12"), "11", 100) is None


def test_primitivity():
    assert is_primitive({1: w("12"), 2: w("1")})
    assert not is_primitive({1: w("11"), 2: w("2")})


def test_source_from_mapping():
    src = source_from_mapping({"kind": "morphic", "morphism": "1:12,2:1", "seed": "1"})
    assert prefix(src, 30) == fib_oracle(30)
    assert prefix(source_from_mapping({"preset": "thue-morse"}), 16) == tm_oracle(16)
    assert source_from_mapping({"kind": "concat", "arity": "2", "program": "X1", "seeds": "2,1"}).kind == "concat"
    s = source_from_mapping({"kind": "sturmian", "slope": "(3 - sqrt(5))/2"})
    assert s.kind == "sturmian"
    with pytest.raises(ValueError):
        source_from_mapping({"kind": "nonsense"})


def test_concat_expand_lengths_follow_fibonacci():
    prog = ConcatProgram(2, (1,))
    lens = [len(concat_expand(prog, (w("2"), w("1")), n)) for n in range(1, 9)]
    assert lens == [1, 1, 2, 3, 5, 8, 13, 21]
