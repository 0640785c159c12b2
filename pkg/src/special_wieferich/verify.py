"""Machine checks for each lemma, theorem and proof identity about special Wieferich primes.

Every checker returns :class:`CheckReport` objects; a failing report always
carries the counterexample data in ``witness``.
"""

from __future__ import annotations

import math
import random
from dataclasses import asdict, dataclass, field
from typing import Any, Iterable

from .bernoulli import bernoulli, bernoulli_mod_p2
from .errors import CapacityError, IrregularReductionError, LemmaViolation, UsageError
from .modarith import MODULUS_CAP, Residue, inv_mod
from .sieve import PrimeRange, SophieGermainPair, is_prime, small_primes, sophie_germain_pairs
from .structure import (
    FactoredInteger,
    factorize,
    lebesgue_lift,
    maxfield_lift,
    multiplicative_order,
    order_mod,
)


@dataclass
class CheckReport:
    check_name: str
    instance: dict[str, Any]
    passed: bool
    witness: dict[str, Any] | None = None

    def __post_init__(self) -> None:
        if not self.passed and not self.witness:
            raise ValueError(f"failing report {self.check_name} needs a witness")

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass
class SuiteResult:
    """Reports of a batch run plus the instances skipped for a stated reason."""

    name: str
    reports: list[CheckReport] = field(default_factory=list)
    skipped: dict[str, int] = field(default_factory=dict)

    @property
    def failures(self) -> list[CheckReport]:
        return [r for r in self.reports if not r.passed]

    @property
    def passed(self) -> bool:
        return not self.failures

    def skip(self, reason: str) -> None:
        self.skipped[reason] = self.skipped.get(reason, 0) + 1


def _require_prime_pair(pair: SophieGermainPair) -> None:
    if pair.q != 2 * pair.p + 1 or not (is_prime(pair.p) and is_prime(pair.q)):
        raise UsageError(f"({pair.p}, {pair.q}) is not a Sophie Germain pair")
    if pair.p % 4 != 3:
        raise UsageError(f"p={pair.p} is not 3 mod 4")
    if pair.q * pair.q >= MODULUS_CAP:
        raise CapacityError(f"q^2 = {pair.q}^2 exceeds 2**62")


def _odd_prime(p: int) -> None:
    if p < 3 or not is_prime(p):
        raise UsageError(f"{p} is not an odd prime")


# -- lemmas -----------------------------------------------------------------


def check_lemma_hw(p: int) -> CheckReport:
    """For p = 3 mod 4, p > 7: 2p+1 prime iff 2^p = 1 mod 2p+1."""
    if not is_prime(p) or p % 4 != 3 or p <= 7:
        raise UsageError(f"p={p} must be a prime > 7 with p = 3 mod 4")
    q = 2 * p + 1
    q_prime = is_prime(q)
    residue = pow(2, p, q)
    return CheckReport(
        "lemma_hw",
        {"p": p, "q": q},
        q_prime == (residue == 1),
        {"q_prime": q_prime, "pow_2_p_mod_q": residue},
    )


def check_lemma_bw(q: int, search_bound: int) -> list[CheckReport]:
    """Prime divisors p <= search_bound of M_q: 2^((p-1)/2) = 1 mod p, and p^2 | M_q forces Wieferich.

    Part a is tested modulo p; the printed modulus M_q cannot be meant.
    """
    if q < 3 or q > 61 or not is_prime(q):
        raise UsageError(f"q={q} must be an odd prime <= 61")
    mersenne = (1 << q) - 1
    reports = []
    step = 2 * q
    for p in range(step + 1, search_bound + 1, step):
        if not is_prime(p) or pow(2, q, p) != 1:
            continue
        half = pow(2, (p - 1) // 2, p)
        square = pow(2, q, p * p) == 1
        wieferich_residue = pow(2, p - 1, p * p)
        ok = half == 1 and mersenne % p == 0 and (not square or wieferich_residue == 1)
        reports.append(
            CheckReport(
                "lemma_bw",
                {"q": q, "p": p},
                ok,
                {
                    "pow_2_half_mod_p": half,
                    "square_divides": square,
                    "pow_2_p_minus_1_mod_p2": wieferich_residue,
                },
            )
        )
    return reports


def check_lemma_el(p: int, nu: int) -> CheckReport:
    """sum_{r=1}^{p-1} r^nu = p * B_nu (mod p^2).

    Raises IrregularReductionError when (p-1) | nu, where B_nu has p in its
    denominator and the right-hand side is undefined mod p^2.
    """
    _odd_prime(p)
    if nu < 2 or nu % (p - 1) == 1 % (p - 1):
        raise UsageError(f"nu={nu} must be >= 2 and not 1 mod {p - 1}")
    if nu % (p - 1) == 0:
        raise IrregularReductionError(f"(p-1) | nu for p={p}, nu={nu}")
    m = p * p
    lhs = sum(pow(r, nu, m) for r in range(1, p)) % m
    rhs = p * bernoulli_mod_p2(bernoulli(nu), p).value % m
    return CheckReport("lemma_el", {"p": p, "nu": nu}, lhs == rhs, {"lhs": lhs, "rhs": rhs})


def _lift_reports(name: str, lift, p: int, r: int, candidates: Iterable[int]) -> list[CheckReport]:
    reports = []
    for a in candidates:
        try:
            witness, order = lift(a, p, r)
        except LemmaViolation as exc:
            reports.append(CheckReport(name, {"p": p, "r": r, "a": a}, False, {"error": str(exc)}))
        else:
            reports.append(
                CheckReport(name, {"p": p, "r": r, "a": a}, True, {"witness": witness, "order": order})
            )
    return reports


def check_lemma_mf(p: int, r: int) -> list[CheckReport]:
    """One report per a in [2, p-1]; each must find a lift of order e*p^(r-1)."""
    _odd_prime(p)
    return _lift_reports("lemma_mf", maxfield_lift, p, r, range(2, p))


def check_lemma_vl(p: int, r: int) -> list[CheckReport]:
    """One report per primitive root a mod p; each must lift to a generator mod p^r."""
    _odd_prime(p)
    group = factorize(p - 1)
    generators = [a for a in range(1, p) if order_mod(a, p, group) == p - 1]
    return _lift_reports("lemma_vl", lebesgue_lift, p, r, generators)


def brute_force_order(a: int, m: int) -> int:
    x, n = a % m, 1
    while x != 1:
        x = x * a % m
        n += 1
    return n


def check_order_laws(
    trials: int, seed: int, modulus_bound: int = 10**5, brute_bound: int = 10**4
) -> list[CheckReport]:
    """Randomized check of o(xy) = o(x)o(y) for coprime orders and o(x^r) = o(x)/gcd(o(x), r).

    When the sampled y has order sharing primes with o(x), y is replaced by
    the power of itself whose order is the coprime part, so law (a) is
    exercised on every trial. Moduli below ``brute_bound`` are cross-checked
    against a brute-force order search.
    """
    rng = random.Random(seed)
    primes = small_primes(modulus_bound - 1)[1:].tolist()
    reports = []
    for trial in range(trials):
        m = rng.choice(primes)
        group = factorize(m - 1)
        x = rng.randrange(1, m)
        y = rng.randrange(1, m)
        exp = rng.randint(1, 4 * m)

        ox = order_mod(x, m, group)
        oy = order_mod(y, m, group)
        shared = 1
        for ell in factorize(oy).primes:
            if ox % ell == 0:
                while oy % (shared * ell) == 0:
                    shared *= ell
        if shared > 1:
            y = pow(y, shared, m)
            oy = order_mod(y, m, group)

        oxy = order_mod(x * y % m, m, group)
        oxr = order_mod(pow(x, exp, m), m, group)
        law_a = math.gcd(ox, oy) == 1 and oxy == ox * oy
        law_b = oxr == ox // math.gcd(ox, exp)
        witness = {"o_x": ox, "o_y": oy, "o_xy": oxy, "o_x_pow": oxr}
        brute_ok = True
        if m < brute_bound:
            brute = {
                "o_x": brute_force_order(x, m),
                "o_y": brute_force_order(y, m),
                "o_xy": brute_force_order(x * y, m),
                "o_x_pow": brute_force_order(pow(x, exp, m), m),
            }
            brute_ok = brute == witness
            witness["brute_force_agrees"] = brute_ok
        reports.append(
            CheckReport(
                "order_laws",
                {"trial": trial, "m": m, "x": x, "y": y, "r": exp},
                law_a and law_b and brute_ok,
                witness,
            )
        )
    return reports


# -- theorems ---------------------------------------------------------------


def check_theorem1(pair: SophieGermainPair) -> CheckReport:
    """q || M_p: 2^p = 1 mod q but not mod q^2."""
    _require_prime_pair(pair)
    p, q = pair.p, pair.q
    mod_q = pow(2, p, q)
    mod_q2 = pow(2, p, q * q)
    return CheckReport(
        "theorem1",
        {"p": p, "q": q},
        mod_q == 1 and mod_q2 != 1,
        {"pow_2_p_mod_q": mod_q, "pow_2_p_mod_q2": mod_q2},
    )


def check_theorem2(pair: SophieGermainPair) -> CheckReport:
    """q is not Wieferich, cross-checked against theorem 1 and q not dividing 2^p + 1."""
    _require_prime_pair(pair)
    p, q = pair.p, pair.q
    m = q * q
    fermat = pow(2, q - 1, m)
    half = pow(2, p, m)
    not_wieferich = fermat != 1
    q_divides_plus = pow(2, p, q) == q - 1
    # q^2 | (2^p - 1)(2^p + 1) with q not dividing 2^p + 1 means q^2 | 2^p - 1.
    derived = not (half == 1) if not q_divides_plus else None
    consistent = half * half % m == fermat and derived is not None and derived == not_wieferich
    return CheckReport(
        "theorem2",
        {"p": p, "q": q},
        not_wieferich and consistent,
        {
            "pow_2_q_minus_1_mod_q2": fermat,
            "pow_2_p_mod_q2": half,
            "q_divides_2p_plus_1": q_divides_plus,
            "consistent_with_theorem1": consistent,
        },
    )


def check_proof_identities(pair: SophieGermainPair) -> list[CheckReport]:
    """The unconditional content of the three proofs, evaluated on a genuine pair."""
    _require_prime_pair(pair)
    p, q = pair.p, pair.q
    m = q * q
    inst = {"p": p, "q": q}
    reports = []

    # (i) sum of squares = q/6 mod q^2
    direct = sum(r * r for r in range(1, q)) % m
    closed = q * (q - 1) * (2 * q - 1) // 6 % m
    target = q * inv_mod(Residue(6, m)).value % m
    reports.append(
        CheckReport(
            "proof_sum_of_squares",
            inst,
            direct == closed == target,
            {"direct": direct, "closed_form": closed, "q_over_6": target},
        )
    )

    # (ii) geometric sum of 4^k, k < q
    geo = 0
    term = 1
    for _ in range(q):
        geo = (geo + term) % m
        term = term * 4 % m
    rhs = (pow(4, q, m) - 1) * inv_mod(Residue(3, m)).value % m
    reports.append(
        CheckReport("proof_geometric_sum", inst, geo == rhs, {"direct": geo, "closed_form": rhs})
    )

    # (iii) orders of 2 and -2 mod q and q^2
    group_q = FactoredInteger(q - 1, ((2, 1), (p, 1)))
    group_q2 = FactoredInteger.from_parts(group_q, FactoredInteger(q, ((q, 1),)))
    o_q_minus2 = multiplicative_order(Residue(q - 2, q), group_q).order
    o_q2_2 = multiplicative_order(Residue(2, m), group_q2).order
    o_q2_minus2 = multiplicative_order(Residue(m - 2, m), group_q2).order
    reports.append(
        CheckReport(
            "proof_orders",
            inst,
            o_q_minus2 == 2 * p and o_q2_2 == p * q and o_q2_minus2 == 2 * p * q == group_q2.n,
            {
                "o_q(-2)": o_q_minus2,
                "o_q2(2)": o_q2_2,
                "o_q2(-2)": o_q2_minus2,
                "group_order": group_q2.n,
            },
        )
    )

    # (iv) one of 2, 2^(p-1) mod q has order p*q mod q^2
    try:
        witness, order = maxfield_lift(2, q, 2)
    except LemmaViolation as exc:
        reports.append(CheckReport("proof_lift_dichotomy", inst, False, {"error": str(exc)}))
    else:
        reports.append(
            CheckReport(
                "proof_lift_dichotomy",
                inst,
                order == p * q,
                {"witness": witness, "order": order, "a1": pow(2, p - 1, q)},
            )
        )
    return reports


# -- batch suites -----------------------------------------------------------


def lemma_el_suite(pmax: int = 311, numax: int = 40) -> SuiteResult:
    suite = SuiteResult("lemma_el")
    for p in small_primes(pmax).tolist():
        if p < 3:
            continue
        for nu in range(2, numax + 1):
            if nu % (p - 1) == 1 % (p - 1):
                suite.skip("nu = 1 mod (p-1)")
                continue
            try:
                suite.reports.append(check_lemma_el(p, nu))
            except IrregularReductionError:
                suite.skip("irregular reduction")
    return suite


def lemma_lift_suite(kind: str, pmax: int = 200, rs: Iterable[int] = (2, 3)) -> SuiteResult:
    check = {"mf": check_lemma_mf, "vl": check_lemma_vl}[kind]
    suite = SuiteResult(f"lemma_{kind}")
    for p in small_primes(pmax - 1).tolist():
        if p < 3:
            continue
        for r in rs:
            suite.reports.extend(check(p, r))
    return suite


def lemma_hw_suite(pmax: int = 10**4) -> SuiteResult:
    suite = SuiteResult("lemma_hw")
    for p in small_primes(pmax - 1).tolist():
        if p > 7 and p % 4 == 3:
            suite.reports.append(check_lemma_hw(p))
    return suite


def lemma_bw_suite(qmax: int = 61, search_bound: int = 10**6) -> SuiteResult:
    suite = SuiteResult("lemma_bw")
    for q in small_primes(qmax).tolist():
        if q >= 3:
            suite.reports.extend(check_lemma_bw(q, search_bound))
    return suite


def theorem_suite(kind: str, limit: int) -> SuiteResult:
    """Run theorem1, theorem2 or proofs over every pair with p = 3 mod 4, p < limit."""
    suite = SuiteResult(kind)
    for pair in sophie_germain_pairs(PrimeRange(2, limit), class_filter=3):
        if kind == "theorem1":
            suite.reports.append(check_theorem1(pair))
        elif kind == "theorem2":
            suite.reports.append(check_theorem2(pair))
        elif kind == "proofs":
            suite.reports.extend(check_proof_identities(pair))
        else:
            raise UsageError(f"unknown theorem check {kind!r}")
    return suite
