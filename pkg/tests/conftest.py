"""Shared fixtures and bigint string oracles.

The oracles recompute leading digit triples straight from exact
integer arithmetic and string slicing, entirely independent of the
package's fixed-point pipeline, so agreement is a real check rather
than a tautology.
"""

from __future__ import annotations

import sys

import numpy as np
import pytest

from artifact import run_survey, resolve_transitional, EXTENDED_GRID

# str(n!) for n in the tens of thousands exceeds CPython's default
# int-to-str digit cap; the oracles are allowed to be slow and stringy.
sys.set_int_max_str_digits(2_000_000)


def lead3_str(x: int) -> int:
    """Leading digit triple via decimal string, zero-padded (1 -> 100)."""
    s = str(x)
    return int(s[:3].ljust(3, "0"))


def oracle_counts_pow(b: int, n_max: int) -> np.ndarray:
    """Triple histogram of b^1 .. b^n_max by exact powering."""
    counts = np.zeros(900, dtype=np.int64)
    v = 1
    for _ in range(n_max):
        v *= b
        counts[lead3_str(v) - 100] += 1
    return counts


def oracle_counts_fibonacci(n_max: int) -> np.ndarray:
    """Triple histogram of F_1 .. F_n_max with F_1 = F_2 = 1."""
    counts = np.zeros(900, dtype=np.int64)
    a, b = 1, 1
    for _ in range(n_max):
        counts[lead3_str(a) - 100] += 1
        a, b = b, a + b
    return counts


def oracle_counts_factorial(n_max: int) -> np.ndarray:
    """Triple histogram of 1! .. n_max!."""
    counts = np.zeros(900, dtype=np.int64)
    v = 1
    for n in range(1, n_max + 1):
        v *= n
        counts[lead3_str(v) - 100] += 1
    return counts


def oracle_star_discrepancy(points) -> float:
    """Star discrepancy from the definition.

    sup over t of |#{x_i < t}/N - t| for t in (0, 1]; the supremum is
    attained at a sample point approached from either side, or at 1.
    Quadratic cost, used only on small sets.
    """
    xs = sorted(points)
    n = len(xs)
    best = 0.0
    for x in xs:
        below = sum(1 for y in xs if y < x)
        at_or_below = sum(1 for y in xs if y <= x)
        best = max(best, abs(below / n - x), abs(at_or_below / n - x))
    return best


@pytest.fixture(scope="session")
def _baseline_run():
    import time
    t0 = time.monotonic()
    records, _ = run_survey(2, 1000)
    return records, time.monotonic() - t0


@pytest.fixture(scope="session")
def baseline_records(_baseline_run):
    """Full five-point survey of bases 2..1000 (in memory)."""
    return _baseline_run[0]


@pytest.fixture(scope="session")
def baseline_elapsed(_baseline_run):
    return _baseline_run[1]


@pytest.fixture(scope="session")
def _extended_run(baseline_records):
    import time
    t0 = time.monotonic()
    updated, report = resolve_transitional(baseline_records, EXTENDED_GRID)
    return (updated, report), time.monotonic() - t0


@pytest.fixture(scope="session")
def extended_state(_extended_run):
    """Extended nine-point resolution pass over the flagged bases."""
    return _extended_run[0]


@pytest.fixture(scope="session")
def extended_elapsed(_extended_run):
    return _extended_run[1]


_acceptance_results: dict[str, str] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" and item.name.startswith("test_criterion_"):
        _acceptance_results[item.name] = rep.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name in sorted(_acceptance_results):
        outcome = _acceptance_results[name]
        tag = "PASS" if outcome == "passed" else outcome.upper()
        terminalreporter.write_line(f"[{tag}] {name}")
