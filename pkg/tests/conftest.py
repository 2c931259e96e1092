from itertools import combinations

import mpmath
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


# -- independent oracles: plain mpmath floats at high precision, no balls -----------


def oracle_verlinde_su(r, k, g, dps=80):
    with mpmath.workdps(dps):
        n, gbar = r + k, g - 1
        total = mpmath.mpf(0)
        for S in combinations(range(n), k):
            T = [t for t in range(n) if t not in S]
            prod = mpmath.mpf(1)
            for s in S:
                for t in T:
                    prod *= abs(2 * mpmath.sin(mpmath.pi * (s - t) / n))
            total += prod**gbar
        return mpmath.mpf(r) ** g / mpmath.mpf(n) ** g * total


def oracle_quot(r, k, g, dps=80):
    with mpmath.workdps(dps):
        n, gbar = r + k, g - 1
        total = mpmath.mpf(0)
        for S in combinations(range(n), k):
            prod = mpmath.mpf(1)
            for s, t in combinations(S, 2):
                prod *= (2 * mpmath.sin(mpmath.pi * (s - t) / n)) ** (-2 * gbar)
            total += prod
        return mpmath.mpf(n) ** (k * gbar) * total


def oracle_verlinde_arbitrary(h, k, r, d, g, dps=80):
    with mpmath.workdps(dps):
        n, gbar = r * (h + k), g - 1
        total = mpmath.mpc(0)
        for T in combinations(range(n), h * r):
            S = [s for s in range(n) if s not in T]
            prod = mpmath.mpf(1)
            for s in S:
                for t in T:
                    prod *= abs(2 * mpmath.sin(mpmath.pi * (s - t) / n))
            total += mpmath.expjpi(2 * mpmath.mpf(d) / r * sum(T)) * prod**gbar
        sign = (-1) ** (h * d * (r - 1))
        return sign * mpmath.mpf(h) ** g / mpmath.mpf(h + k) ** g * total


def oracle_theta00(tau, z, dps=60, terms=80):
    with mpmath.workdps(dps):
        tau, z = mpmath.mpc(tau), mpmath.mpc(z)
        return mpmath.fsum(
            mpmath.exp(mpmath.pi * 1j * n * n * tau + 2 * mpmath.pi * 1j * n * z) for n in range(-terms, terms + 1)
        )


def nearest_int(x) -> int:
    return int(mpmath.nint(mpmath.re(x)))


@pytest.fixture
def oracles():
    return {
        "verlinde_su": oracle_verlinde_su,
        "quot": oracle_quot,
        "verlinde_arbitrary": oracle_verlinde_arbitrary,
        "theta00": oracle_theta00,
    }
