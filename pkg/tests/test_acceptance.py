"""Exit criteria. Each test appends one PASS/FAIL line to the terminal summary."""

import io
import json
import math
import os
import signal
import subprocess
import sys
import time
from fractions import Fraction

import pytest

from conftest import ACCEPTANCE_LINES, naive_primes
from special_wieferich import verify
from special_wieferich.bernoulli import bernoulli_table
from special_wieferich.cli import run
from special_wieferich.modarith import square_multiply
from special_wieferich.search import ScanConfig, read_checkpoint, scan


@pytest.fixture
def criterion(request):
    state = {"detail": ""}
    yield state
    rep = getattr(request.node, "rep_call", None)
    ok = rep is not None and rep.passed
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {request.node.name}: {state['detail']}")


def cli(*argv):
    buf = io.StringIO()
    code = run(list(argv), stdout=buf)
    return code, [json.loads(x) for x in buf.getvalue().splitlines()], buf.getvalue()


def _sieve_oracle(n):
    flags = bytearray([1]) * n
    flags[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(n) + 1):
        if flags[i]:
            flags[i * i :: i] = bytearray(len(range(i * i, n, i)))
    return [i for i in range(n) if flags[i]]


def test_c1_theorem1_scan_to_1e7(criterion):
    t0 = time.monotonic()
    code, lines, _ = cli("scan", "theorem1", "--lo", "2", "--hi", "10000000", "--workers", "4")
    elapsed = time.monotonic() - t0
    summary = lines[-1]
    criterion["detail"] = f"{summary['findings']} findings, {summary['tested']} pairs, {elapsed:.1f}s"
    assert code == 0
    assert summary["findings"] == 0 and len(lines) == 1
    assert summary["complete"]
    assert elapsed < 120


def test_c2_wieferich_below_1e6(criterion):
    code, lines, _ = cli("scan", "wieferich", "--lo", "2", "--hi", "1000000")
    found = {x["p"] for x in lines[:-1]}
    # oracle: bytearray sieve + hand-written square-and-multiply
    oracle = {p for p in _sieve_oracle(10**6) if square_multiply(2, p - 1, p * p) == 1}
    criterion["detail"] = f"scan {sorted(found)}, oracle {sorted(oracle)}"
    assert code == 0
    assert found == oracle == {1093, 3511}


def test_c3_theorems_below_1e5(criterion):
    t1 = verify.theorem_suite("theorem1", 10**5)
    t2 = verify.theorem_suite("theorem2", 10**5)
    oracle = [p for p in naive_primes(2, 10**5) if p % 4 == 3 and naive_primes(2 * p + 1, 2 * p + 2)]
    got = [r.instance["p"] for r in t1.reports]
    chain = all(
        r2.witness["consistent_with_theorem1"]
        and (r1.witness["pow_2_p_mod_q2"] != 1) == (r2.witness["pow_2_q_minus_1_mod_q2"] != 1)
        and not r2.witness["q_divides_2p_plus_1"]
        for r1, r2 in zip(t1.reports, t2.reports)
    )
    criterion["detail"] = f"{len(got)} pairs, {len(t1.failures)}+{len(t2.failures)} failures, chain={chain}"
    assert got == oracle == [r.instance["p"] for r in t2.reports]
    assert t1.passed and t2.passed and chain
    assert all(r.witness is not None for r in t1.reports + t2.reports)


def test_c4_lemma_el(criterion):
    suite = verify.lemma_el_suite(311, 40)
    bern = bernoulli_table(40)
    checked = skipped = 0
    for p in naive_primes(3, 312):
        for nu in range(2, 41):
            if nu % (p - 1) == 1 % (p - 1):
                continue
            if nu % (p - 1) == 0:
                skipped += 1
                continue
            # exact rational oracle: p^2 divides (sum r^nu - p B_nu)
            diff = sum(r**nu for r in range(1, p)) - p * bern[nu].value
            assert diff.denominator % p != 0
            assert diff.numerator % (p * p) == 0, (p, nu)
            checked += 1
    criterion["detail"] = (
        f"{len(suite.reports)} instances, {len(suite.failures)} failures, "
        f"{suite.skipped.get('irregular reduction', 0)} skipped (p-1 | nu)"
    )
    assert suite.passed
    assert len(suite.reports) == checked
    assert suite.skipped["irregular reduction"] == skipped


def test_c5_lifting_lemmas(criterion):
    t0 = time.monotonic()
    mf = verify.lemma_lift_suite("mf", 200, (2, 3))
    vl = verify.lemma_lift_suite("vl", 200, (2, 3))
    elapsed = time.monotonic() - t0
    primes = naive_primes(3, 200)
    criterion["detail"] = (
        f"mf {len(mf.reports)} / vl {len(vl.reports)} instances, "
        f"{len(mf.failures) + len(vl.failures)} tripwires, {elapsed:.1f}s"
    )
    assert len(mf.reports) == 2 * sum(p - 2 for p in primes)
    assert len(vl.reports) == 2 * sum(
        sum(1 for d in range(1, p) if math.gcd(d, p - 1) == 1) for p in primes
    )
    assert mf.passed and vl.passed
    assert elapsed < 30


def test_c6_order_laws(criterion):
    reports = verify.check_order_laws(10_000, seed=20_240_101)
    failures = [r for r in reports if not r.passed]
    brute = sum(1 for r in reports if "brute_force_agrees" in r.witness)
    criterion["detail"] = f"10000 trials, {len(failures)} failures, {brute} brute-force cross-checks"
    assert len(reports) == 10_000 and not failures
    assert all(r.instance["m"] < 10**5 for r in reports)
    assert brute > 0


def test_c7_proof_identities(criterion):
    suite = verify.theorem_suite("proofs", 10**4)
    pairs = {r.instance["p"] for r in suite.reports}
    orders = [r for r in suite.reports if r.check_name == "proof_orders"]
    criterion["detail"] = f"{len(pairs)} pairs, {len(suite.reports)} identities, {len(suite.failures)} failures"
    assert suite.passed
    assert len(suite.reports) == 4 * len(pairs)
    for r in orders:
        p, q = r.instance["p"], r.instance["q"]
        assert r.witness["o_q2(2)"] == p * q
        assert r.witness["o_q2(-2)"] == 2 * p * q


def test_c8_bernoulli(criterion):
    from test_bernoulli import akiyama_tanigawa

    ok20 = [b.value for b in bernoulli_table(20)] == akiyama_tanigawa(20)
    vsc = all(
        b.denominator == math.prod(ell for ell in naive_primes(2, b.index + 2) if b.index % (ell - 1) == 0)
        for b in bernoulli_table(100)[2::2]
    )
    criterion["detail"] = f"B_0..B_20 oracle match={ok20}, von Staudt-Clausen to 100={vsc}"
    assert ok20 and vsc


def _near_cfg(**kw):
    return ScanConfig("near_wieferich", 2, 2_000_000, chunk=65_536, near_threshold=100, **kw)


def test_c9_determinism_and_resume(criterion, tmp_path):
    dumps = {}
    for workers in (1, 4, 16):
        findings, _ = scan(_near_cfg(workers=workers))
        dumps[workers] = "".join(json.dumps(f.to_dict()) + "\n" for f in findings)
    identical = len(set(dumps.values())) == 1

    # in-process interruption at several chunk boundaries
    full = scan(_near_cfg())[0]
    resumes_ok = True
    for stop in (1, 7, 19, 30):
        ck = tmp_path / f"ck{stop}"
        head, _ = scan(_near_cfg(workers=4), ck, max_chunks=stop)
        tail, _ = scan(_near_cfg(workers=2), ck)
        resumes_ok &= head + tail == full

    # real SIGKILL of a CLI process, then resume from its checkpoint
    ck = tmp_path / "killed"
    argv = [sys.executable, "-m", "special_wieferich", "scan", "near-wieferich", "--lo", "2",
            "--hi", "20000000", "--chunk", "131072", "--checkpoint", str(ck)]
    proc = subprocess.Popen(argv, stdout=subprocess.PIPE, stderr=subprocess.DEVNULL)
    deadline = time.monotonic() + 60
    while not ck.exists() and time.monotonic() < deadline:
        time.sleep(0.01)
    time.sleep(0.2)
    proc.send_signal(signal.SIGKILL)
    out, _ = proc.communicate()
    prefix = read_checkpoint(ck).completed_prefix_end
    before = [x for x in out.decode().splitlines() if x.strip().startswith("{")]
    before = [x for x in before if '"summary"' not in x and json.loads(x)["p"] < prefix]
    resumed = subprocess.run(argv, capture_output=True, check=True).stdout.decode().splitlines()[:-1]
    uninterrupted = subprocess.run(argv[:-2], capture_output=True, check=True).stdout.decode().splitlines()[:-1]
    killed_ok = 2 < prefix < 20_000_000 and before + resumed == uninterrupted

    criterion["detail"] = (
        f"workers 1/4/16 identical={identical}, boundary resumes={resumes_ok}, "
        f"SIGKILL at prefix {prefix} resumed exactly={killed_ok}"
    )
    assert identical and resumes_ok and killed_ok
