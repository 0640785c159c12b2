"""Exact Bernoulli numbers (B_1 = -1/2 convention) and their reduction mod p^2."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import CapacityError, IrregularReductionError, UsageError
from .modarith import Residue

MAX_INDEX = 1000


@dataclass(frozen=True)
class BernoulliNumber:
    index: int
    value: Fraction

    @property
    def numerator(self) -> int:
        return self.value.numerator

    @property
    def denominator(self) -> int:
        return self.value.denominator


@lru_cache(maxsize=8)
def _table(upto: int) -> tuple[Fraction, ...]:
    # sum_{n=0}^{m} C(m+1, n) B_n = 0 for m >= 1, solved for B_m.
    values = [Fraction(1)]
    row = [1, 1]  # C(1, .)
    for m in range(1, upto + 1):
        row = [1] + [row[i] + row[i + 1] for i in range(len(row) - 1)] + [1]  # C(m+1, .)
        if m > 1 and m % 2 == 1:
            values.append(Fraction(0))
            continue
        acc = sum((row[n] * values[n] for n in range(m) if values[n]), Fraction(0))
        values.append(-acc / (m + 1))
    return tuple(values)


def bernoulli_table(max_index: int) -> list[BernoulliNumber]:
    """B_0 .. B_max_index as exact rationals."""
    if max_index < 0:
        raise UsageError("max_index must be nonnegative")
    if max_index > MAX_INDEX:
        raise CapacityError(f"max_index {max_index} exceeds cap {MAX_INDEX}")
    values = _cached_prefix(max_index)
    return [BernoulliNumber(i, v) for i, v in enumerate(values[: max_index + 1])]


def _cached_prefix(max_index: int) -> tuple[Fraction, ...]:
    # Round requests up so repeated small calls share one computed table.
    size = 64
    while size < max_index:
        size *= 2
    return _table(min(size, MAX_INDEX))


def bernoulli(index: int) -> BernoulliNumber:
    return bernoulli_table(index)[index]


def bernoulli_mod_p2(b: BernoulliNumber, p: int) -> Residue:
    modulus = p * p
    if b.denominator % p == 0:
        raise IrregularReductionError(
            f"B_{b.index} has denominator {b.denominator} divisible by {p}"
        )
    return Residue(b.numerator * pow(b.denominator, -1, modulus) % modulus, modulus)
