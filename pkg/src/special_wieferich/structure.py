"""Factorization, element orders in (Z/mZ)*, and order lifting to prime powers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import CapacityError, LemmaViolation, NotCoprimeError, UsageError
from .modarith import MODULUS_CAP, Residue
from .sieve import is_prime, small_primes

TRIAL_LIMIT = 10**6


@dataclass(frozen=True)
class FactoredInteger:
    n: int
    factors: tuple[tuple[int, int], ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "factors", tuple(sorted(self.factors)))
        if math.prod(p**e for p, e in self.factors) != self.n:
            raise UsageError(f"factors {self.factors} do not multiply to {self.n}")

    @property
    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    @classmethod
    def from_parts(cls, *parts: FactoredInteger) -> FactoredInteger:
        """Product of several factored integers, merging exponents."""
        merged: dict[int, int] = {}
        for part in parts:
            for p, e in part.factors:
                merged[p] = merged.get(p, 0) + e
        return cls(math.prod(x.n for x in parts), tuple(merged.items()))


@dataclass(frozen=True)
class OrderResult:
    element: Residue
    order: int


def _brent(n: int, c: int) -> int:
    """One Pollard-Brent attempt with f(x) = x^2 + c; returns a divisor (n on failure)."""
    y, r, q, g = 2, 1, 1, 1
    m = 128
    x = ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = math.gcd(q, n)
            k += m
        r *= 2
    if g == n:
        g = 1
        while g == 1:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
    return g


def _split(n: int, out: dict[int, int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    root = math.isqrt(n)
    if root * root == n:
        _split(root, out)
        _split(root, out)
        return
    c = 1
    while True:
        d = _brent(n, c)
        if 1 < d < n:
            break
        c += 1
    _split(d, out)
    _split(n // d, out)


@lru_cache(maxsize=1)
def _trial_primes() -> tuple[int, ...]:
    return tuple(small_primes(TRIAL_LIMIT).tolist())


@lru_cache(maxsize=4096)
def factorize(n: int) -> FactoredInteger:
    """Trial division by primes up to 10**6, then Pollard-Brent on the cofactor.

    The rho parameter sequence c = 1, 2, 3, ... is fixed, so results and
    running time are reproducible.
    """
    if n < 1:
        raise UsageError(f"cannot factor {n}")
    if n >= MODULUS_CAP:
        raise CapacityError(f"{n} exceeds the 2**62 factorization bound")
    out: dict[int, int] = {}
    rest = n
    for p in _trial_primes():
        if p * p > rest:
            break
        if rest % p == 0:
            e = 0
            while rest % p == 0:
                rest //= p
                e += 1
            out[p] = e
    if rest > 1:
        _split(rest, out)
    return FactoredInteger(n, tuple(out.items()))


def totient_factored(modulus: int) -> FactoredInteger:
    """phi(modulus) in factored form."""
    parts = []
    for p, e in factorize(modulus).factors:
        parts.append(factorize(p - 1))
        if e > 1:
            parts.append(FactoredInteger(p ** (e - 1), ((p, e - 1),)))
    return FactoredInteger.from_parts(*parts) if parts else FactoredInteger(1)


def prime_power_group_order(p: int, r: int) -> FactoredInteger:
    """|(Z/p^r Z)*| = p^(r-1) (p-1), factored."""
    parts = [factorize(p - 1)]
    if r > 1:
        parts.append(FactoredInteger(p ** (r - 1), ((p, r - 1),)))
    return FactoredInteger.from_parts(*parts)


def multiplicative_order(a: Residue, group_order: FactoredInteger) -> OrderResult:
    m = a.modulus
    if math.gcd(a.value, m) != 1:
        raise NotCoprimeError(f"{a.value} is not coprime to {m}")
    order = group_order.n
    if pow(a.value, order, m) != 1:
        raise UsageError(f"{group_order.n} is not a multiple of the order of {a.value} mod {m}")
    for ell, e in group_order.factors:
        for _ in range(e):
            if pow(a.value, order // ell, m) != 1:
                break
            order //= ell
    return OrderResult(a, order)


def order_mod(a: int, modulus: int, group_order: FactoredInteger | None = None) -> int:
    """Convenience wrapper returning just the integer order."""
    if group_order is None:
        group_order = totient_factored(modulus)
    return multiplicative_order(Residue(a % modulus, modulus), group_order).order


def maxfield_lift(a: int, p: int, r: int) -> tuple[int, int]:
    """Return (witness, order): the one of a, a^(e-1) mod p with order e*p^(r-1) mod p^r.

    The second candidate is reduced mod p *before* being read mod p^r;
    reducing mod p^r instead would give an element of order e only.
    """
    if p < 3 or not is_prime(p):
        raise UsageError(f"p={p} must be an odd prime")
    if r < 1:
        raise UsageError("r must be >= 1")
    if not 1 <= a <= p - 1:
        raise UsageError(f"a={a} must lie in [1, {p - 1}]")
    e = order_mod(a, p, factorize(p - 1))
    if e == 1:
        raise UsageError("a has order 1 mod p")
    target = e * p ** (r - 1)
    modulus = p**r
    group = prime_power_group_order(p, r)
    a1 = pow(a, e - 1, p)
    orders = {}
    for cand in (a, a1):
        o = order_mod(cand, modulus, group)
        orders[cand] = o
        if o == target:
            return cand, o
    raise LemmaViolation(
        f"neither {a} nor {a1} has order {target} mod {p}^{r}: orders {orders}"
    )


def lebesgue_lift(a: int, p: int, r: int) -> tuple[int, int]:
    """Return (witness, order): the one of a, a^(p-2) mod p generating (Z/p^r Z)*."""
    if p < 3 or not is_prime(p):
        raise UsageError(f"p={p} must be an odd prime")
    if r < 1:
        raise UsageError("r must be >= 1")
    if not 1 <= a <= p - 1:
        raise UsageError(f"a={a} must lie in [1, {p - 1}]")
    if order_mod(a, p, factorize(p - 1)) != p - 1:
        raise UsageError(f"{a} is not a primitive root mod {p}")
    modulus = p**r
    group = prime_power_group_order(p, r)
    a1 = pow(a, p - 2, p)
    orders = {}
    for cand in (a, a1):
        o = order_mod(cand, modulus, group)
        orders[cand] = o
        if o == group.n:
            return cand, o
    raise LemmaViolation(
        f"neither {a} nor {a1} generates (Z/{p}^{r}Z)*: orders {orders}"
    )
