from math import factorial, sqrt

import numpy as np
import pytest

from kerrjc.fock import FockSpace


@pytest.fixture
def space64():
    return FockSpace(64)


@pytest.fixture
def space32():
    return FockSpace(32)


def brute_coherent(xi, dim):
    """Fock amplitudes from the textbook series, term by term with exact factorials."""
    return np.array(
        [np.exp(-abs(xi) ** 2 / 2) * xi**n / sqrt(factorial(n)) for n in range(dim)],
        dtype=complex,
    )


def ladder_path_element(m, n, steps):
    """<m|(a + a^dag)^steps|n> by enumerating every up/down path (no matrices)."""
    total = 0.0
    for code in range(2**steps):
        level, amp = n, 1.0
        for s in range(steps):
            if (code >> s) & 1:
                amp *= sqrt(level + 1)
                level += 1
            else:
                if level == 0:
                    amp = 0.0
                    break
                amp *= sqrt(level)
                level -= 1
        if amp and level == m:
            total += amp
    return total


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
