import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gal.core import StateVector, validate_instance  # noqa: E402


def random_instance(rng, n_lo=8, n_hi=4096, power_of_two=False):
    if power_of_two:
        n = 2 ** int(rng.integers(int(np.log2(n_lo)), int(np.log2(n_hi)) + 1))
    else:
        n = int(rng.integers(n_lo, n_hi + 1))
    # bias toward small r so both sparse and dense marking get exercised
    r = int(min(n // 2, max(1, np.floor(np.exp(rng.uniform(0, np.log(n / 2)))))))
    marked = rng.choice(n, size=r, replace=False)
    return validate_instance(n, marked)


def random_state(rng, n):
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return StateVector(z / np.linalg.norm(z))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def _report(criterion, ok, detail):
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}")
        assert ok, detail

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
