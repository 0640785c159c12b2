"""Verification and search toolkit for Wieferich primes of the form 2p+1."""

from .errors import (
    CapacityError,
    CheckpointError,
    IrregularReductionError,
    LemmaViolation,
    NotCoprimeError,
    UsageError,
    WieferichError,
)
from .modarith import Residue, inv_mod, mul_mod, pow_mod
from .sieve import PrimeRange, SophieGermainPair, is_prime, primes_in_range, sophie_germain_pairs
from .structure import FactoredInteger, OrderResult, factorize, lebesgue_lift, maxfield_lift, multiplicative_order
from .bernoulli import BernoulliNumber, bernoulli_mod_p2, bernoulli_table
from .search import Checkpoint, Finding, ScanConfig, ScanReport, checkpoint_roundtrip, scan

__version__ = "0.1.0"
