"""Exact modular arithmetic on residues with moduli below 2**62."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CapacityError, ModulusMismatchError, NotCoprimeError, UsageError

MODULUS_CAP = 1 << 62


@dataclass(frozen=True, slots=True)
class Residue:
    """An element of Z/mZ, always stored in canonical form 0 <= value < modulus."""

    value: int
    modulus: int

    def __post_init__(self) -> None:
        if self.modulus < 2:
            raise UsageError(f"modulus must be >= 2, got {self.modulus}")
        if self.modulus >= MODULUS_CAP:
            raise CapacityError(f"modulus {self.modulus} exceeds the 2**62 capacity bound")
        if not 0 <= self.value < self.modulus:
            object.__setattr__(self, "value", self.value % self.modulus)

    def __int__(self) -> int:
        return self.value


def residue(value: int, modulus: int) -> Residue:
    return Residue(value % modulus, modulus)


def mul_mod(a: Residue, b: Residue) -> Residue:
    if a.modulus != b.modulus:
        raise ModulusMismatchError(f"modulus mismatch: {a.modulus} != {b.modulus}")
    return Residue(a.value * b.value % a.modulus, a.modulus)


def square_multiply(base: int, exponent: int, modulus: int) -> int:
    """Right-to-left binary exponentiation; the reference path for ``pow_mod``."""
    if exponent < 0:
        raise UsageError("exponent must be nonnegative")
    result = 1 % modulus
    base %= modulus
    while exponent:
        if exponent & 1:
            result = result * base % modulus
        base = base * base % modulus
        exponent >>= 1
    return result


def pow_mod(base: Residue, exponent: int) -> Residue:
    return Residue(square_multiply(base.value, exponent, base.modulus), base.modulus)


def inv_mod(a: Residue) -> Residue:
    try:
        inverse = pow(a.value, -1, a.modulus)
    except ValueError:
        raise NotCoprimeError(f"{a.value} is not coprime to {a.modulus}") from None
    return Residue(inverse, a.modulus)
