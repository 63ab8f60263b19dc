import numpy as np
import pytest

from lerwray.rng import make_rng

ACCEPTANCE_LINES = []


def record_acceptance(number, label, passed, detail):
    line = f"criterion {number:>2} [{'PASS' if passed else 'FAIL'}] {label}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


@pytest.fixture
def rng():
    return make_rng(20240611)


def binomial_ok(count, n, p, k=4.0):
    """|count/n - p| within k standard errors of a binomial proportion."""
    sigma = np.sqrt(p * (1 - p) / n)
    return abs(count / n - p) <= k * sigma


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
