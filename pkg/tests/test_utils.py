import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st

from sequence import brute_force_block
from utils import (
    block_survivors,
    consecutive_primes,
    count_survivors,
    is_prime,
    iter_primes,
    make_rng,
    parse_rational,
    period_pattern,
    primes_upto,
    progression_survivors,
    rational_from_json,
    rational_to_json,
    trigamma,
)

SIEVE = set(primes_upto(10 ** 4).tolist())


def test_primes_upto_small():
    assert primes_upto(30).tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert primes_upto(1).tolist() == []


@given(st.integers(min_value=-5, max_value=10 ** 4))
def test_is_prime_matches_sieve(n):
    assert is_prime(n) == (n in SIEVE)


def test_is_prime_large():
    assert is_prime(2 ** 61 - 1)
    assert not is_prime(2 ** 61 + 1)
    assert not is_prime(97_979_797)


def test_prime_iteration():
    assert list(iter_primes(10, 30)) == [11, 13, 17, 19, 23, 29]
    assert consecutive_primes(90, 3) == [97, 101, 103]
    assert consecutive_primes(90, 3, limit=100) == [97]


@given(
    st.sampled_from([(2, 3), (3, 5), (5, 7), (7, 11), (3, 5, 7)]),
    st.integers(min_value=0, max_value=3),
    st.integers(min_value=0, max_value=60),
    st.integers(min_value=0, max_value=200),
)
def test_survivors_match_literal_rule(primes, d, lo, length):
    got = progression_survivors(primes, d, lo, lo + length).tolist()
    assert got == brute_force_block(primes, d, lo, lo + length)


@pytest.mark.parametrize("primes,d,periods", [((5, 7), 2, 7), ((7, 11), 3, 5), ((3, 5, 7), 1, 4)])
def test_tiling_matches_literal_rule(primes, d, periods):
    p = math.prod(primes)
    lo = 3 * p
    hi = lo + periods * p + 13
    tiled = block_survivors(primes, d, lo, hi)
    assert tiled.tolist() == progression_survivors(primes, d, lo, hi).tolist()
    assert count_survivors(primes, d, lo, hi) == len(tiled)


def test_period_pattern_drops_shared_neighbourhood():
    pattern = period_pattern((5, 7), 2).tolist()
    assert 0 not in pattern
    assert 5 not in pattern and 7 not in pattern
    assert 14 not in pattern and 28 not in pattern
    assert 10 in pattern and 25 in pattern


def test_count_survivors_first_block():
    assert count_survivors((1,), 1, 0, 97_979_797) == 97_979_797
    assert count_survivors((5, 7), 2, 10, 10) == 0


def test_rational_codec():
    assert rational_to_json(Fraction(3, 8)) == {"num": "3", "den": "8"}
    assert rational_from_json({"num": "3", "den": "8"}) == Fraction(3, 8)
    assert rational_from_json(5) == 5


def test_parse_rational():
    assert parse_rational("0.125") == Fraction(1, 8)
    assert parse_rational(" 3/8 ") == Fraction(3, 8)
    with pytest.raises(ValueError):
        parse_rational("x")
    with pytest.raises(ValueError):
        parse_rational("1/0")


def test_make_rng_is_deterministic():
    a, b = make_rng(7), make_rng(7)
    assert np.array_equal(a.integers(0, 1000, 20), b.integers(0, 1000, 20))
    assert not np.array_equal(make_rng(8).integers(0, 1000, 20), make_rng(7).integers(0, 1000, 20))


def test_trigamma_values():
    assert trigamma(1.0) == pytest.approx(math.pi ** 2 / 6, abs=1e-12)
    assert trigamma(0.5) == pytest.approx(math.pi ** 2 / 2, abs=1e-12)
    assert trigamma(2.0) == pytest.approx(math.pi ** 2 / 6 - 1, abs=1e-12)
