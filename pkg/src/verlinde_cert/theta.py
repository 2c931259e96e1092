"""Jacobi theta series on an elliptic curve with rigorous truncation.

Points are exact complex rationals (pairs of Fractions); floats and decimal
strings are converted exactly. Every series term is an enclosure of
exp(pi i x) at an exact argument x, so no error accumulates through power
recurrences. The discarded tail is bounded by a geometric series and folded
into the radius.
"""

from __future__ import annotations

import hashlib
import math
import random
import re
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mpf
from mpmath.libmp import fzero, mpf_add, mpf_lt, from_man_exp, round_ceiling

from .certball import (
    DEFAULT_PREC,
    MAG_PREC,
    Ball,
    ComplexBall,
    PossiblyZeroError,
    det,
    exp_i_pi,
    interval_context,
)

Exact = tuple[Fraction, Fraction]

MIN_IM_TAU = Fraction(1, 10)
SAMPLE_ATTEMPTS = 8

_COMPLEX_RE = re.compile(
    r"^\s*(?P<re>[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?(?![\d.]*[ij]))?"
    r"\s*(?P<im>[+-]?\s*(?:(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)?\s*\*?\s*[ij])?\s*$"
)


def parse_complex(text: str) -> Exact:
    """Parse '1+2i', '-0.4+0.1j', '2i', 'i', '0.3' into an exact pair."""
    m = _COMPLEX_RE.match(text)
    if not m or (m.group("re") is None and m.group("im") is None):
        raise ValueError(f"cannot parse complex number {text!r}")
    re_part = Fraction(m.group("re")) if m.group("re") else Fraction(0)
    im_part = Fraction(0)
    if m.group("im"):
        coeff = m.group("im").replace(" ", "").replace("*", "")[:-1]
        if coeff in ("", "+"):
            im_part = Fraction(1)
        elif coeff == "-":
            im_part = Fraction(-1)
        else:
            im_part = Fraction(coeff)
    return re_part, im_part


def as_exact(x) -> Exact:
    if isinstance(x, tuple):
        return Fraction(x[0]), Fraction(x[1])
    if isinstance(x, str):
        return parse_complex(x)
    if isinstance(x, complex):
        return Fraction(x.real), Fraction(x.imag)
    return Fraction(x), Fraction(0)


def _add(*xs: Exact) -> Exact:
    return sum((x[0] for x in xs), Fraction(0)), sum((x[1] for x in xs), Fraction(0))


def _scale(c, x: Exact) -> Exact:
    return c * x[0], c * x[1]


@dataclass(frozen=True)
class ModulusPoint:
    tau: Exact
    z: Exact

    def __init__(self, tau, z=0):
        object.__setattr__(self, "tau", as_exact(tau))
        object.__setattr__(self, "z", as_exact(z))
        if self.tau[1] <= 0:
            raise ValueError("not in upper half-plane")
        if self.tau[1] < MIN_IM_TAU:
            raise ValueError("Im(tau) < 0.1 is not supported (no modular reduction)")


@dataclass(frozen=True)
class ThetaValue:
    value: ComplexBall
    truncation_N: int
    tail_bound: mpf


def _tail_bound(y: Fraction, c: Fraction, N: int, prec: int):
    """Upper bound (raw mpf) on sum_{|n|>N} exp(-pi y n^2 + 2 pi c |n|), or None
    if the ratio test fails at this N."""
    ctx = interval_context(prec + 20)
    Y = ctx.mpf(y.numerator) / y.denominator
    C = ctx.mpf(c.numerator) / c.denominator
    m = N + 1
    first = ctx.exp(-ctx.pi * Y * m * m + 2 * ctx.pi * C * m)
    # successive-term ratio for n >= m is at most rho
    rho = ctx.exp(-ctx.pi * Y * (2 * m + 1) + 2 * ctx.pi * C)
    if not rho.b < 1:
        return None
    return (2 * first / (1 - rho))._mpi_[1]


def _truncation(y: Fraction, c: Fraction, prec: int):
    target = from_man_exp(1, -(prec + 8))
    N = max(1, math.floor(2 * c / y) + 2)
    # float estimate of where the Gaussian tail drops below 2^-(prec+8)
    yf, cf = float(y), float(c)
    while math.pi * yf * (N + 1) ** 2 - 2 * math.pi * cf * (N + 1) < (prec + 8) * math.log(2):
        N += 1
    while True:
        bound = _tail_bound(y, c, N, prec)
        if bound is not None and mpf_lt(bound, target):
            return N, bound
        N += 1


def theta00(p: ModulusPoint, prec: int = DEFAULT_PREC) -> ThetaValue:
    """sum_n exp(pi i n^2 tau + 2 pi i n z), truncated at |n| <= N."""
    tau, z = p.tau, p.z
    N, tail = _truncation(tau[1], abs(z[1]), prec)
    total = ComplexBall.exact(0, 0, prec)
    for n in range(-N, N + 1):
        total = total + exp_i_pi(_add(_scale(n * n, tau), _scale(2 * n, z)), prec)
    rad = mpf_add(tail, fzero, MAG_PREC, round_ceiling)
    widened = ComplexBall(
        total.re + Ball._raw(fzero, rad, prec),
        total.im + Ball._raw(fzero, rad, prec),
    )
    return ThetaValue(widened, N, mpf(tail))


def theta_half_half(p: ModulusPoint, prec: int = DEFAULT_PREC) -> ThetaValue:
    """exp(pi i tau/4 + pi i (z + 1/2)) * theta00(z + (tau+1)/2)."""
    tau, z = p.tau, p.z
    shifted = ModulusPoint(tau, _add(z, _scale(Fraction(1, 2), _add(tau, (Fraction(1), Fraction(0))))))
    inner = theta00(shifted, prec)
    scale = exp_i_pi(_add(_scale(Fraction(1, 4), tau), z, (Fraction(1, 2), Fraction(0))), prec)
    return ThetaValue(scale * inner.value, inner.truncation_N, inner.tail_bound)


def _t00(tau: Exact, z: Exact, prec: int) -> ComplexBall:
    return theta00(ModulusPoint(tau, z), prec).value


def _thh(tau: Exact, z: Exact, prec: int) -> ComplexBall:
    return theta_half_half(ModulusPoint(tau, z), prec).value


def addition_residual(tau, z, w, prec: int = DEFAULT_PREC) -> ComplexBall:
    """theta(z+w) theta(w-z) theta(0)^2 - theta(z)^2 theta(w)^2 - thh(z)^2 thh(w)^2."""
    tau, z, w = as_exact(tau), as_exact(z), as_exact(w)
    zero = (Fraction(0), Fraction(0))
    lhs = _t00(tau, _add(z, w), prec) * _t00(tau, _add(w, _scale(-1, z)), prec) * _t00(tau, zero, prec) ** 2
    rhs = (_t00(tau, z, prec) * _t00(tau, w, prec)) ** 2 + (_thh(tau, z, prec) * _thh(tau, w, prec)) ** 2
    return lhs - rhs


def _level_two_basis(tau: Exact, x: Exact, prec: int) -> tuple[ComplexBall, ComplexBall]:
    return _t00(tau, x, prec) ** 2, _thh(tau, x, prec) ** 2


def _section(tau: Exact, z: Exact, w: Exact, prec: int) -> ComplexBall:
    return _t00(tau, _add(z, w), prec) * _t00(tau, _add(w, _scale(-1, z)), prec)


def _sampler(tau: Exact) -> random.Random:
    key = f"{tau[0].numerator}/{tau[0].denominator}|{tau[1].numerator}/{tau[1].denominator}"
    seed = int.from_bytes(hashlib.sha256(key.encode()).digest()[:8], "big")
    return random.Random(seed)


def _random_point(rng: random.Random, tau: Exact) -> Exact:
    # moderate imaginary parts keep theta values O(1)
    scale = 1 << 16
    a = Fraction(rng.randrange(-scale // 2, scale // 2), scale)
    b = Fraction(rng.randrange(-scale // 4, scale // 4), scale) * min(tau[1], 1)
    return a, b


def duality_matrix_rk1(tau, prec: int = DEFAULT_PREC) -> tuple[tuple[ComplexBall, ComplexBall], tuple[ComplexBall, ComplexBall]]:
    """Coefficients M with theta(z+w) theta(w-z) = sum_ab M[a][b] B_a(z) B_b(w),
    B = (theta00^2, theta_half_half^2), fitted at four sample pairs.

    The sample pairs come from a generator seeded by tau, so the result is
    reproducible; a singular sample system triggers the next batch.
    """
    tau = as_exact(tau)
    ModulusPoint(tau)
    rng = _sampler(tau)
    for _ in range(SAMPLE_ATTEMPTS):
        rows, rhs = [], []
        for _ in range(4):
            z, w = _random_point(rng, tau), _random_point(rng, tau)
            bz, bw = _level_two_basis(tau, z, prec), _level_two_basis(tau, w, prec)
            rows.append([bz[0] * bw[0], bz[0] * bw[1], bz[1] * bw[0], bz[1] * bw[1]])
            rhs.append(_section(tau, z, w, prec))
        try:
            sol = _cramer(rows, rhs)
        except PossiblyZeroError:
            continue
        return (sol[0], sol[1]), (sol[2], sol[3])
    raise ArithmeticError("sample system singular at every attempt")


def _cramer(rows: list[list[ComplexBall]], rhs: list[ComplexBall]) -> list[ComplexBall]:
    d = det(rows)
    d_inv = d.inv()
    out = []
    for col in range(len(rows)):
        swapped = [row[:col] + [b] + row[col + 1:] for row, b in zip(rows, rhs)]
        out.append(det(swapped) * d_inv)
    return out


def duality_residual(matrix, tau, z, w, prec: int = DEFAULT_PREC) -> ComplexBall:
    """Section minus its expansion through ``matrix`` at a fresh pair (z, w)."""
    tau, z, w = as_exact(tau), as_exact(z), as_exact(w)
    bz, bw = _level_two_basis(tau, z, prec), _level_two_basis(tau, w, prec)
    fit = ComplexBall.exact(0, 0, prec)
    for a in range(2):
        for b in range(2):
            fit = fit + matrix[a][b] * bz[a] * bw[b]
    return _section(tau, z, w, prec) - fit
