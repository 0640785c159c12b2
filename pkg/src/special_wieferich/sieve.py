"""Segmented odd-only sieve, deterministic Miller-Rabin, Sophie Germain pairs."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from .errors import CapacityError, UsageError

SIEVE_CAP = 1 << 40
DEFAULT_SEGMENT = 256 * 1024

# Deterministic for every n < 3.3 * 10**24 (Sorenson & Webster), so covers 2**64.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_SMALL_PRIMES = _MR_WITNESSES + (43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97)


@dataclass(frozen=True)
class PrimeRange:
    lo: int
    hi: int
    segment_size: int = DEFAULT_SEGMENT

    def __post_init__(self) -> None:
        if self.lo < 2:
            object.__setattr__(self, "lo", 2)
        if self.hi < self.lo:
            raise UsageError(f"empty or inverted range [{self.lo}, {self.hi})")
        if self.segment_size <= 0:
            raise UsageError("segment_size must be positive")


@dataclass(frozen=True)
class SophieGermainPair:
    p: int
    q: int
    p_mod_4: int

    @classmethod
    def from_p(cls, p: int) -> SophieGermainPair:
        q = 2 * p + 1
        if not (is_prime(p) and is_prime(q)):
            raise UsageError(f"{p} is not a Sophie Germain prime")
        return cls(p, q, p % 4)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for sp in _SMALL_PRIMES:
        if n % sp == 0:
            return n == sp
    if n < 97 * 97:
        return True
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=8)
def _base_primes(limit: int) -> np.ndarray:
    """All primes <= limit by a plain sieve."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    return np.flatnonzero(flags).astype(np.int64)


def small_primes(limit: int) -> np.ndarray:
    return _base_primes(limit)


def _odd_segments(lo: int, hi: int, segment_size: int) -> Iterator[np.ndarray]:
    """Yield arrays of the odd primes in [lo, hi), one array per window."""
    base = _base_primes(math.isqrt(max(hi - 1, 0)))[1:]
    low = lo | 1
    span = 2 * segment_size
    while low < hi:
        high = min(low + span, hi)
        n_odd = (high - low + 1) // 2
        mask = np.ones(n_odd, dtype=bool)
        for p in base:
            p = int(p)
            p2 = p * p
            if p2 >= high:
                break
            start = max(p2, -(-low // p) * p)
            if start % 2 == 0:
                start += p
            if start < high:
                mask[(start - low) // 2 :: p] = False
        yield low + 2 * np.flatnonzero(mask).astype(np.int64)
        low += span


def prime_array(rng: PrimeRange) -> np.ndarray:
    """Primes in [lo, hi) as one int64 array."""
    if rng.hi > SIEVE_CAP:
        raise CapacityError(
            f"hi={rng.hi} exceeds sieve capacity 2**40; use primes_by_testing instead"
        )
    parts = [np.array([2], dtype=np.int64)] if rng.lo <= 2 < rng.hi else []
    parts.extend(_odd_segments(rng.lo, rng.hi, rng.segment_size))
    if not parts:
        return np.array([], dtype=np.int64)
    return np.concatenate(parts)


def primes_in_range(rng: PrimeRange) -> Iterator[int]:
    if rng.hi > SIEVE_CAP:
        raise CapacityError(
            f"hi={rng.hi} exceeds sieve capacity 2**40; use primes_by_testing instead"
        )
    if rng.lo <= 2 < rng.hi:
        yield 2
    for seg in _odd_segments(rng.lo, rng.hi, rng.segment_size):
        yield from seg.tolist()


def primes_by_testing(lo: int, hi: int) -> Iterator[int]:
    """Candidate-by-candidate enumeration, used above the sieve capacity."""
    if lo <= 2 < hi:
        yield 2
    for n in range(max(lo, 3) | 1, hi, 2):
        if is_prime(n):
            yield n


def sophie_germain_array(rng: PrimeRange, class_filter: int | None = None) -> np.ndarray:
    """Sophie Germain primes p in [lo, hi), optionally restricted to p % 4 == class_filter."""
    if class_filter not in (None, 1, 3):
        raise UsageError("class_filter must be 1, 3 or None")
    ps = prime_array(rng)
    if class_filter is not None:
        ps = ps[ps % 4 == class_filter]
    if ps.size == 0:
        return ps
    q_hi = 2 * rng.hi + 1
    if q_hi <= SIEVE_CAP:
        qs = prime_array(PrimeRange(2 * int(ps[0]) + 1, q_hi, rng.segment_size))
        return ps[np.isin(2 * ps + 1, qs, assume_unique=True)]
    return np.array([p for p in ps.tolist() if is_prime(2 * p + 1)], dtype=np.int64)


def sophie_germain_pairs(
    rng: PrimeRange, class_filter: int | None = None
) -> Iterator[SophieGermainPair]:
    if rng.hi > SIEVE_CAP:
        candidates = (p for p in primes_by_testing(rng.lo, rng.hi) if is_prime(2 * p + 1))
        for p in candidates:
            if class_filter is None or p % 4 == class_filter:
                yield SophieGermainPair(p, 2 * p + 1, p % 4)
        return
    for p in sophie_germain_array(rng, class_filter).tolist():
        yield SophieGermainPair(p, 2 * p + 1, p % 4)
