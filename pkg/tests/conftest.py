import math

import mpmath
import numpy as np
import pytest

ACCEPTANCE_LINES = []


def record(criterion, passed, detail):
    """Register one acceptance line for the terminal summary."""
    ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


mpmath.mp.dps = 40


def mp_cdf(x):
    """High-precision Gaussian CDF, independent of the library path."""
    return float(mpmath.ncdf(mpmath.mpf(x)))


def mp_quantile(p):
    # erfinv near 1 loses digits, so work in the nearer tail with extra precision
    with mpmath.workdps(60):
        p = mpmath.mpf(p)
        lower = p <= 0.5
        q = p if lower else 1 - p
        x = mpmath.findroot(lambda t: mpmath.log(mpmath.ncdf(t)) - mpmath.log(q),
                           -mpmath.sqrt(-2 * mpmath.log(q)) if q < 0.1 else mpmath.mpf(0))
        return float(x if lower else -x)


def mp_xi(s):
    p = (1 - mpmath.mpf(s)) / 2
    q = -mpmath.sqrt(2) * mpmath.erfinv(1 - 2 * p)
    return float(mpmath.sqrt(2 / mpmath.pi) * mpmath.exp(-q * q / 2))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def gw_grid_oracle(points=10**7):
    theta = np.linspace(math.pi / points, math.pi, points)
    vals = (2 * theta / math.pi) / (1 - np.cos(theta))
    k = int(np.argmin(vals))
    return float(theta[k]), float(vals[k])
