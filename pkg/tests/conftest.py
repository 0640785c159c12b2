import math

import pytest


def naive_primes(lo, hi):
    """Trial-division prime list on [lo, hi); independent of the sieve."""
    return [n for n in range(max(lo, 2), hi) if all(n % d for d in range(2, math.isqrt(n) + 1))]


def brute_order(a, m):
    a %= m
    x, n = a, 1
    while x != 1:
        x = x * a % m
        n += 1
    return n


@pytest.fixture(scope="session")
def primes_below_1e4():
    return naive_primes(2, 10**4)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    if call.when == "call":
        item.rep_call = outcome.get_result()
