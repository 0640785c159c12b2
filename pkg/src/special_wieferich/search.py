"""Parallel, checkpointable range scans for Wieferich-type primes.

Three scan kinds are supported:

``theorem1``
    Sophie Germain primes p = 3 mod 4 with 2^p = 1 mod (2p+1)^2.
``wieferich``
    primes p with 2^(p-1) = 1 mod p^2.
``near_wieferich``
    odd primes p with 2^((p-1)/2) = +-1 + A*p mod p^2 and |A| <= threshold.

The range is cut into chunks that worker processes handle independently.
A single collector consumes chunk results in ascending order, so findings
never depend on worker count or scheduling, and it alone writes the
checkpoint recording the completed contiguous prefix.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
import time
from collections import deque
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Iterator

from .errors import CapacityError, CheckpointError, UsageError
from .sieve import PrimeRange, prime_array, sophie_germain_array

log = logging.getLogger(__name__)

KINDS = ("theorem1", "wieferich", "near_wieferich")
DEFAULT_CHUNK = 1 << 20
DEFAULT_NEAR_THRESHOLD = 100
CHECKPOINT_VERSION = 1

# q = 2p+1 and q^2 < 2**62 need p < 2**30; p^2 < 2**62 needs p < 2**31.
CAPACITY = {"theorem1": 1 << 30, "wieferich": 1 << 31, "near_wieferich": 1 << 31}

# Published exhaustive-search bound (Dorais & Klyve, 2008): no Wieferich primes
# other than 1093 and 3511 below it. Recorded for reference, never recomputed.
KNOWN_WIEFERICH_FREE_BOUND = 6.7e15


@dataclass(frozen=True)
class ScanConfig:
    kind: str
    lo: int
    hi: int
    chunk: int = DEFAULT_CHUNK
    workers: int = 1
    near_threshold: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise UsageError(f"unknown scan kind {self.kind!r}; expected one of {KINDS}")
        if self.lo < 0 or self.hi < self.lo:
            raise UsageError(f"invalid range [{self.lo}, {self.hi})")
        if self.chunk <= 0 or self.workers <= 0:
            raise UsageError("chunk and workers must be positive")
        if self.hi > CAPACITY[self.kind]:
            raise CapacityError(
                f"hi={self.hi} exceeds the {self.kind} capacity {CAPACITY[self.kind]} "
                "(moduli must stay below 2**62)"
            )
        if self.kind == "near_wieferich":
            if self.near_threshold is None:
                object.__setattr__(self, "near_threshold", DEFAULT_NEAR_THRESHOLD)
            elif self.near_threshold < 0:
                raise UsageError("near_threshold must be nonnegative")
        else:
            object.__setattr__(self, "near_threshold", None)

    @property
    def digest(self) -> str:
        """Stable hash of the fields that determine the findings (not workers or chunk)."""
        key = {"kind": self.kind, "lo": self.lo, "hi": self.hi, "near_threshold": self.near_threshold}
        blob = json.dumps(key, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class Finding:
    kind: str
    p: int
    q: int
    witness: int
    a: int | None = None

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"kind": self.kind, "p": self.p, "q": self.q, "witness": self.witness}
        if self.a is not None:
            d["a"] = self.a
        return d

    def reverify(self) -> bool:
        """Recompute the single exponentiation that produced ``witness``."""
        if self.kind == "theorem1":
            return pow(2, self.p, self.q * self.q) == self.witness == 1
        if self.kind == "wieferich":
            return pow(2, self.p - 1, self.p * self.p) == self.witness == 1
        got = pow(2, (self.p - 1) // 2, self.p * self.p)
        return got == self.witness and self.a is not None and _near_a(got, self.p) == self.a


@dataclass(frozen=True)
class Checkpoint:
    config_digest: str
    completed_prefix_end: int
    findings_count: int
    timestamp: int
    version: int = CHECKPOINT_VERSION

    def to_line(self) -> str:
        return (
            f"v{self.version} {self.config_digest} {self.completed_prefix_end} "
            f"{self.findings_count} {self.timestamp}\n"
        )

    @classmethod
    def from_line(cls, line: str) -> Checkpoint:
        parts = line.split()
        if len(parts) != 5 or parts[0] != f"v{CHECKPOINT_VERSION}":
            raise CheckpointError(f"unrecognized checkpoint record {line.strip()!r}")
        try:
            return cls(parts[1], int(parts[2]), int(parts[3]), int(parts[4]))
        except ValueError as exc:
            raise CheckpointError(f"malformed checkpoint record {line.strip()!r}") from exc


def write_checkpoint(checkpoint: Checkpoint, path: str | os.PathLike) -> None:
    """Atomically replace ``path`` with the checkpoint record."""
    path = Path(path)
    try:
        fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name + ".", suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            fh.write(checkpoint.to_line())
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except OSError as exc:
        raise CheckpointError(f"cannot write checkpoint {path}: {exc}") from exc


def read_checkpoint(path: str | os.PathLike) -> Checkpoint:
    try:
        line = Path(path).read_text()
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    return Checkpoint.from_line(line)


def checkpoint_roundtrip(checkpoint: Checkpoint, path: str | os.PathLike) -> Checkpoint:
    write_checkpoint(checkpoint, path)
    return read_checkpoint(path)


@dataclass
class ChunkResult:
    lo: int
    hi: int
    tested: int
    findings: list[Finding]


@dataclass
class ScanReport:
    kind: str
    lo: int
    hi: int
    resumed_from: int
    covered_to: int
    chunks: int = 0
    tested: int = 0
    findings: int = 0
    total_findings: int = 0
    elapsed: float = 0.0
    workers: int = 1
    complete: bool = False
    config_digest: str = ""

    @property
    def throughput(self) -> float:
        return self.tested / self.elapsed if self.elapsed > 0 else 0.0

    def to_dict(self, timings: bool = False) -> dict[str, Any]:
        d = asdict(self)
        if timings:
            d["throughput"] = self.throughput
        else:
            del d["elapsed"]
        return d


def _near_a(residue: int, p: int) -> int:
    sign = 1 if residue % p == 1 else -1
    a = (residue - sign) // p
    if a > p // 2:
        a -= p
    return a


def scan_chunk(kind: str, lo: int, hi: int, near_threshold: int | None = None) -> ChunkResult:
    """Apply one scan kind's test to every candidate p in [lo, hi)."""
    rng = PrimeRange(max(lo, 2), max(hi, 2))
    findings: list[Finding] = []
    if kind == "theorem1":
        ps = sophie_germain_array(rng, class_filter=3).tolist()
        for p in ps:
            q = 2 * p + 1
            w = pow(2, p, q * q)
            if w == 1:
                findings.append(Finding(kind, p, q, w))
    elif kind == "wieferich":
        ps = prime_array(rng).tolist()
        for p in ps:
            w = pow(2, p - 1, p * p)
            if w == 1:
                findings.append(Finding(kind, p, p, w))
    elif kind == "near_wieferich":
        ps = [p for p in prime_array(rng).tolist() if p > 2]
        for p in ps:
            w = pow(2, (p - 1) >> 1, p * p)
            a = _near_a(w, p)
            if abs(a) <= near_threshold:
                findings.append(Finding(kind, p, p, w, a))
    else:
        raise UsageError(f"unknown scan kind {kind!r}")
    return ChunkResult(lo, hi, len(ps), findings)


def _chunk_bounds(lo: int, hi: int, width: int) -> Iterator[tuple[int, int]]:
    start = lo
    while start < hi:
        yield start, min(start + width, hi)
        start += width


def _ordered_results(config: ScanConfig, start: int, executor: Executor | None) -> Iterator[ChunkResult]:
    bounds = _chunk_bounds(start, config.hi, config.chunk)
    if executor is None:
        for lo, hi in bounds:
            yield scan_chunk(config.kind, lo, hi, config.near_threshold)
        return
    window = 4 * config.workers
    pending: deque = deque()
    for lo, hi in bounds:
        pending.append(executor.submit(scan_chunk, config.kind, lo, hi, config.near_threshold))
        if len(pending) >= window:
            yield pending.popleft().result()
    while pending:
        yield pending.popleft().result()


def iter_scan(
    config: ScanConfig,
    checkpoint_path: str | os.PathLike | None = None,
    max_chunks: int | None = None,
    report: ScanReport | None = None,
) -> Iterator[Finding]:
    """Yield findings in ascending p, checkpointing after every completed chunk.

    ``max_chunks`` stops cleanly after that many chunks, leaving a checkpoint
    a later call resumes from. ``report`` is filled in as the scan proceeds.
    """
    start = config.lo
    prior_findings = 0
    if checkpoint_path is not None and Path(checkpoint_path).exists():
        cp = read_checkpoint(checkpoint_path)
        if cp.config_digest != config.digest:
            raise CheckpointError(
                f"checkpoint {checkpoint_path} belongs to scan {cp.config_digest}, "
                f"not {config.digest}; refusing to resume"
            )
        start = max(cp.completed_prefix_end, config.lo)
        prior_findings = cp.findings_count
        log.info("resuming %s scan from %d", config.kind, start)

    if report is None:
        report = ScanReport(config.kind, config.lo, config.hi, start, start)
    report.resumed_from = report.covered_to = start
    report.total_findings = prior_findings
    report.workers = config.workers
    report.config_digest = config.digest

    t0 = time.monotonic()
    executor = ProcessPoolExecutor(config.workers) if config.workers > 1 else None
    try:
        for res in _ordered_results(config, start, executor):
            if res.lo != report.covered_to:
                raise RuntimeError("chunk results arrived out of order")
            for f in res.findings:
                yield f
            report.chunks += 1
            report.tested += res.tested
            report.findings += len(res.findings)
            report.total_findings += len(res.findings)
            report.covered_to = res.hi
            report.elapsed = time.monotonic() - t0
            if checkpoint_path is not None:
                write_checkpoint(
                    Checkpoint(config.digest, res.hi, report.total_findings, int(time.time())),
                    checkpoint_path,
                )
            if max_chunks is not None and report.chunks >= max_chunks:
                break
    finally:
        if executor is not None:
            executor.shutdown(wait=True, cancel_futures=True)
    report.elapsed = time.monotonic() - t0
    report.complete = report.covered_to >= config.hi


def scan(
    config: ScanConfig,
    checkpoint_path: str | os.PathLike | None = None,
    max_chunks: int | None = None,
) -> tuple[list[Finding], ScanReport]:
    report = ScanReport(config.kind, config.lo, config.hi, config.lo, config.lo)
    findings = list(iter_scan(config, checkpoint_path, max_chunks, report))
    return findings, report
