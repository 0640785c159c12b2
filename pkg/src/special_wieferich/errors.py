"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: usage errors exit 2, capacity and
runtime errors exit 3, lemma violations exit 1.
"""


class WieferichError(Exception):
    """Base class for every error raised by this package."""


class UsageError(WieferichError, ValueError):
    """Caller passed inputs outside an operation's preconditions."""


class ModulusMismatchError(UsageError):
    pass


class NotCoprimeError(UsageError):
    pass


class IrregularReductionError(UsageError):
    """A Bernoulli denominator is divisible by the prime being reduced against."""


class CapacityError(WieferichError):
    """Input exceeds a documented capacity bound (sieve range, 62-bit moduli, table size)."""


class LemmaViolation(WieferichError):
    """A lemma guaranteed by the mathematics failed to hold. Must never fire."""


class CheckpointError(WieferichError):
    """Checkpoint unreadable, unwritable, or belonging to a different scan."""
