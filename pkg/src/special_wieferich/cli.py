"""Command-line front end. Records go to stdout as JSON lines; the last line
is always a summary record. Human-readable notes go to stderr.

Exit codes: 0 clean, 1 lemma/theorem violation, 2 usage error, 3 runtime or
capacity error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Any, Iterable, TextIO

from . import search, verify
from .bernoulli import bernoulli_mod_p2, bernoulli_table
from .errors import CapacityError, CheckpointError, LemmaViolation, UsageError, WieferichError
from .sieve import PrimeRange, SophieGermainPair, is_prime, primes_in_range, sophie_germain_pairs
from .structure import multiplicative_order, totient_factored
from .modarith import Residue

WORKERS_ENV = "SPECIAL_WIEFERICH_WORKERS"

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        raise UsageError(message)


class _Out:
    def __init__(self, stream: TextIO) -> None:
        self.stream = stream

    def emit(self, record: dict[str, Any]) -> None:
        self.stream.write(json.dumps(record, separators=(",", ":")) + "\n")
        self.stream.flush()

    def summary(self, command: str, **totals: Any) -> None:
        self.emit({"summary": True, "command": command, **totals})


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def _int(text: str) -> int:
    """Accept 1000000, 1_000_000, 1e6 and 2**20 style integers."""
    s = text.replace("_", "")
    try:
        if "**" in s:
            base, exp = s.split("**")
            return int(base) ** int(exp)
        if "e" in s.lower():
            value = float(s)
            if value != int(value):
                raise ValueError
            return int(value)
        return int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="special-wieferich", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sieve", help="list primes or Sophie Germain pairs in [lo, hi)")
    p.add_argument("--lo", type=_int, required=True)
    p.add_argument("--hi", type=_int, required=True)
    p.add_argument("--sg", action="store_true", help="emit Sophie Germain pairs only")
    p.add_argument("--mod4", type=int, choices=(1, 3))

    p = sub.add_parser("order", help="multiplicative order of base modulo modulus")
    p.add_argument("--base", type=_int, required=True)
    p.add_argument("--modulus", type=_int, required=True)

    p = sub.add_parser("bernoulli", help="exact Bernoulli numbers, optionally reduced mod P^2")
    p.add_argument("--max", type=_int, required=True, dest="max_index")
    p.add_argument("--mod-p2", type=_int, dest="mod_p2")

    p = sub.add_parser("verify-lemma", help="run a lemma suite")
    p.add_argument("lemma", choices=("orders", "bw", "hw", "mf", "vl", "el"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=_int, default=10_000)
    p.add_argument("--mod-bound", type=_int, default=10**5)
    p.add_argument("--brute-bound", type=_int, default=10**4)
    p.add_argument("--pmax", type=_int, help="largest prime tested (mf/vl: exclusive)")
    p.add_argument("--numax", type=_int, default=40)
    p.add_argument("--r", type=int, nargs="+", default=[2, 3], dest="rs")
    p.add_argument("--qmax", type=_int, default=61)
    p.add_argument("--search-bound", type=_int, default=10**6)

    p = sub.add_parser("check", help="theorem and proof-identity checkers")
    p.add_argument("target", choices=("theorem1", "theorem2", "proofs"))
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--p", type=_int, help="single Sophie Germain prime p = 3 mod 4")
    g.add_argument("--limit", type=_int, help="every such p below the limit")

    p = sub.add_parser("scan", help="parallel range search")
    p.add_argument("kind", choices=("theorem1", "wieferich", "near-wieferich"))
    p.add_argument("--lo", type=_int, required=True)
    p.add_argument("--hi", type=_int, required=True)
    p.add_argument("--workers", type=int, help=f"default: ${WORKERS_ENV} or 1")
    p.add_argument("--chunk", type=_int, default=search.DEFAULT_CHUNK)
    p.add_argument("--checkpoint")
    p.add_argument("--near-threshold", type=_int)
    p.add_argument("--max-chunks", type=_int, help="stop after this many chunks (resumable)")
    return parser


def _cmd_sieve(args: argparse.Namespace, out: _Out) -> int:
    rng = PrimeRange(args.lo, args.hi)
    count = 0
    if args.sg or args.mod4:
        for pair in sophie_germain_pairs(rng, args.mod4):
            out.emit({"p": pair.p, "q": pair.q, "p_mod_4": pair.p_mod_4})
            count += 1
    else:
        for prime in primes_in_range(rng):
            out.emit({"p": prime})
            count += 1
    out.summary("sieve", lo=rng.lo, hi=rng.hi, count=count)
    _note(f"{count} {'pairs' if args.sg or args.mod4 else 'primes'} in [{rng.lo}, {rng.hi})")
    return EXIT_OK


def _cmd_order(args: argparse.Namespace, out: _Out) -> int:
    if args.modulus < 2:
        raise UsageError("modulus must be >= 2")
    group = totient_factored(args.modulus)
    res = multiplicative_order(Residue(args.base % args.modulus, args.modulus), group)
    out.emit({"base": args.base, "modulus": args.modulus, "order": res.order, "group_order": group.n})
    out.summary("order", count=1, generator=res.order == group.n)
    return EXIT_OK


def _cmd_bernoulli(args: argparse.Namespace, out: _Out) -> int:
    p = args.mod_p2
    if p is not None and (p < 3 or not is_prime(p)):
        raise UsageError("--mod-p2 must be an odd prime")
    skipped = 0
    table = bernoulli_table(args.max_index)
    for b in table:
        rec: dict[str, Any] = {"index": b.index, "numerator": b.numerator, "denominator": b.denominator}
        if p is not None:
            try:
                rec["residue"] = bernoulli_mod_p2(b, p).value
                rec["modulus"] = p * p
            except UsageError:
                rec["residue"] = None
                rec["skipped"] = "irregular reduction"
                skipped += 1
        out.emit(rec)
    out.summary("bernoulli", count=len(table), skipped=skipped)
    return EXIT_OK


def _emit_suite(out: _Out, suite: verify.SuiteResult, command: str) -> int:
    for r in suite.reports:
        out.emit(r.to_dict())
    failures = len(suite.failures)
    out.summary(
        command,
        name=suite.name,
        checks=len(suite.reports),
        passed=len(suite.reports) - failures,
        failed=failures,
        skipped=suite.skipped,
    )
    skipped = sum(suite.skipped.values())
    _note(
        f"{suite.name}: {len(suite.reports) - failures}/{len(suite.reports)} passed"
        + (f", {skipped} skipped {suite.skipped}" if skipped else "")
    )
    return EXIT_VIOLATION if failures else EXIT_OK


def _cmd_verify(args: argparse.Namespace, out: _Out) -> int:
    lemma = args.lemma
    if lemma == "orders":
        suite = verify.SuiteResult("order_laws")
        suite.reports = verify.check_order_laws(
            args.trials, args.seed, args.mod_bound, args.brute_bound
        )
    elif lemma == "bw":
        suite = verify.lemma_bw_suite(args.qmax, args.search_bound)
    elif lemma == "hw":
        suite = verify.lemma_hw_suite(args.pmax or 10**4)
    elif lemma in ("mf", "vl"):
        suite = verify.lemma_lift_suite(lemma, args.pmax or 200, args.rs)
    else:
        suite = verify.lemma_el_suite(args.pmax or 311, args.numax)
    return _emit_suite(out, suite, "verify-lemma")


def _cmd_check(args: argparse.Namespace, out: _Out) -> int:
    if args.p is not None:
        if not (is_prime(args.p) and is_prime(2 * args.p + 1)):
            raise UsageError(f"{args.p} is not a Sophie Germain prime")
        pair = SophieGermainPair(args.p, 2 * args.p + 1, args.p % 4)
        suite = verify.SuiteResult(args.target)
        if args.target == "theorem1":
            suite.reports.append(verify.check_theorem1(pair))
        elif args.target == "theorem2":
            suite.reports.append(verify.check_theorem2(pair))
        else:
            suite.reports.extend(verify.check_proof_identities(pair))
    else:
        if args.limit > math.isqrt(1 << 62) // 2:
            raise CapacityError("--limit too large: q^2 must stay below 2**62")
        suite = verify.theorem_suite(args.target, args.limit)
    return _emit_suite(out, suite, "check")


def _cmd_scan(args: argparse.Namespace, out: _Out) -> int:
    workers = args.workers
    if workers is None:
        env = os.environ.get(WORKERS_ENV)
        try:
            workers = int(env) if env else 1
        except ValueError:
            raise UsageError(f"${WORKERS_ENV} must be an integer, got {env!r}") from None
    config = search.ScanConfig(
        kind=args.kind.replace("-", "_"),
        lo=args.lo,
        hi=args.hi,
        chunk=args.chunk,
        workers=workers,
        near_threshold=args.near_threshold,
    )
    report = search.ScanReport(config.kind, config.lo, config.hi, config.lo, config.lo)
    for finding in search.iter_scan(config, args.checkpoint, args.max_chunks, report):
        out.emit(finding.to_dict())
    out.summary("scan", **report.to_dict())
    _note(
        f"{config.kind}: tested {report.tested} candidates in [{report.resumed_from}, "
        f"{report.covered_to}), {report.findings} findings, "
        f"{report.elapsed:.2f}s ({report.throughput:,.0f}/s, {workers} workers)"
        + ("" if report.complete else f"; incomplete, resume from {report.covered_to}")
    )
    if config.kind == "theorem1" and report.findings:
        return EXIT_VIOLATION
    return EXIT_OK


_COMMANDS = {
    "sieve": _cmd_sieve,
    "order": _cmd_order,
    "bernoulli": _cmd_bernoulli,
    "verify-lemma": _cmd_verify,
    "check": _cmd_check,
    "scan": _cmd_scan,
}


def run(argv: Iterable[str] | None = None, stdout: TextIO | None = None) -> int:
    out = _Out(stdout or sys.stdout)
    try:
        args = build_parser().parse_args(None if argv is None else list(argv))
        return _COMMANDS[args.command](args, out)
    except UsageError as exc:
        _note(f"usage error: {exc}")
        return EXIT_USAGE
    except LemmaViolation as exc:
        _note(f"lemma violation: {exc}")
        return EXIT_VIOLATION
    except (CapacityError, CheckpointError, WieferichError, OSError) as exc:
        _note(f"error: {exc}")
        return EXIT_RUNTIME


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
