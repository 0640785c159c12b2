import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import naive_primes
from special_wieferich.errors import CapacityError
from special_wieferich.sieve import (
    SIEVE_CAP,
    PrimeRange,
    SophieGermainPair,
    is_prime,
    primes_by_testing,
    primes_in_range,
    sophie_germain_pairs,
)


def test_small_ranges():
    assert list(primes_in_range(PrimeRange(2, 11))) == [2, 3, 5, 7]
    assert list(primes_in_range(PrimeRange(90, 100))) == [97]
    assert list(primes_in_range(PrimeRange(24, 29))) == []


def test_prime_count_to_a_million():
    # Independent oracle: a plain bytearray sieve.
    n = 10**6
    flags = bytearray([1]) * n
    flags[0] = flags[1] = 0
    for i in range(2, 1001):
        if flags[i]:
            flags[i * i :: i] = bytearray(len(range(i * i, n, i)))
    assert sum(flags) == 78498
    assert sum(1 for _ in primes_in_range(PrimeRange(2, n))) == 78498


@settings(max_examples=200)
@given(st.integers(2, 10**5), st.integers(0, 3000), st.integers(1, 700))
def test_segmented_matches_trial_division(lo, width, segment):
    hi = min(lo + width, 10**5)
    rng = PrimeRange(lo, hi, segment_size=segment)
    assert list(primes_in_range(rng)) == naive_primes(lo, hi)


@pytest.mark.parametrize("segment", [1, 7, 64, 4096, 1 << 18])
def test_segment_size_independence(segment):
    ref = list(primes_in_range(PrimeRange(10**6, 10**6 + 20000)))
    assert list(primes_in_range(PrimeRange(10**6, 10**6 + 20000, segment))) == ref


def test_capacity():
    with pytest.raises(CapacityError):
        list(primes_in_range(PrimeRange(SIEVE_CAP - 10, SIEVE_CAP + 10)))
    above = list(primes_by_testing(SIEVE_CAP, SIEVE_CAP + 200))
    assert above and all(is_prime(p) for p in above)


def test_is_prime_examples():
    assert is_prime(1093)
    assert not is_prime(1093**2)
    assert not is_prime(1)
    assert not is_prime(0)


def test_is_prime_matches_trial_division(primes_below_1e4):
    expected = set(primes_below_1e4)
    assert {n for n in range(10**4) if is_prime(n)} == expected


@pytest.mark.parametrize(
    "n, expected",
    [
        (2**61 - 1, True),
        (2**31 - 1, True),
        (3215031751, False),  # strong pseudoprime to bases 2, 3, 5, 7
        (3825123056546413051, False),  # strong pseudoprime to the first nine prime bases
        (318665857834031151167461, False),  # strong pseudoprime to the first twelve prime bases
        (561, False),
        ((2**31 - 1) * (2**29 - 3), False),
        (4611686018427387847, True),  # largest prime below 2**62
    ],
)
def test_is_prime_hard_cases(n, expected):
    assert is_prime(n) is expected


def test_is_prime_random_semiprimes():
    rng = random.Random(7)
    ps = [p for p in range(10**6, 10**6 + 2000) if is_prime(p)]
    for _ in range(200):
        a, b = rng.choice(ps), rng.choice(ps)
        assert not is_prime(a * b)


def _sg_oracle(lo, hi, cls=None):
    return [
        p
        for p in naive_primes(lo, hi)
        if naive_primes(2 * p + 1, 2 * p + 2) and (cls is None or p % 4 == cls)
    ]


def test_sophie_germain_examples():
    assert [x.p for x in sophie_germain_pairs(PrimeRange(2, 100), 3)] == [3, 11, 23, 83]
    assert _sg_oracle(2, 100, 3) == [3, 11, 23, 83]
    pairs = {x.p: x for x in sophie_germain_pairs(PrimeRange(2, 100))}
    assert pairs[29] == SophieGermainPair(29, 59, 1)
    assert list(sophie_germain_pairs(PrimeRange(13, 23), 3)) == []


@pytest.mark.parametrize("cls", [None, 1, 3])
def test_sophie_germain_oracle(cls):
    got = [x.p for x in sophie_germain_pairs(PrimeRange(2, 5000), cls)]
    assert got == _sg_oracle(2, 5000, cls)
    for pair in sophie_germain_pairs(PrimeRange(2, 5000), cls):
        assert is_prime(pair.p) and is_prime(pair.q) and pair.q == 2 * pair.p + 1
        assert pair.p_mod_4 == pair.p % 4


def test_sophie_germain_above_capacity():
    lo = SIEVE_CAP
    got = [x.p for x in sophie_germain_pairs(PrimeRange(lo, lo + 5000))]
    assert got == [p for p in primes_by_testing(lo, lo + 5000) if is_prime(2 * p + 1)]


def test_sophie_germain_q_above_capacity():
    lo = (1 << 39) + 1000
    got = [x.p for x in sophie_germain_pairs(PrimeRange(lo, lo + 3000))]
    assert got == [p for p in primes_by_testing(lo, lo + 3000) if is_prime(2 * p + 1)]
