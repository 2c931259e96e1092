"""Midpoint-radius ball arithmetic over mpmath's raw binary floats.

A :class:`Ball` stores an exact dyadic midpoint rounded to ``prec`` bits and a
radius kept as a short (30-bit) binary float that is always rounded upward.
Every operation returns a ball that contains the exact result for every pair
of points in its inputs.

Transcendental enclosures (``pi``, ``exp``, ``sin``) come from mpmath's
interval context, which rounds outward; everything else is done here.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from numbers import Rational
from typing import Sequence

from mpmath import mpf
from mpmath import libmp
from mpmath.ctx_iv import MPIntervalContext
from mpmath.libmp import (
    fone,
    from_float,
    from_int,
    from_rational,
    fzero,
    mpf_abs,
    mpf_add,
    mpf_div,
    mpf_lt,
    mpf_mul,
    mpf_neg,
    mpf_pos,
    mpf_shift,
    mpf_sub,
    round_ceiling,
    round_floor,
    round_nearest,
    to_rational,
)

MAG_PREC = 30
DEFAULT_PREC = 128
MAX_PREC = 16384


class CertificationError(ArithmeticError):
    """No integer can be certified from a ball at the current precision."""


class PrecisionExhausted(ArithmeticError):
    """Escalation reached the precision cap without a certified result."""


class PossiblyZeroError(ZeroDivisionError):
    """Division by a ball whose interval contains zero."""


# -- raw helpers on mpmath tuples -------------------------------------------------


def _mag(x) -> int:
    """Exponent bound: |x| < 2**_mag(x). Meaningless for zero."""
    return x[2] + x[3]


def _ulp_bound(y, prec: int):
    """Upper bound on |exact - y| when y is exact rounded to nearest at prec."""
    if y == fzero:
        return fzero
    return libmp.from_man_exp(1, _mag(y) - prec)


def _rup(x):
    """Round a nonnegative value up to a radius-sized float."""
    return mpf_pos(x, MAG_PREC, round_ceiling)


def _radd(*terms):
    acc = fzero
    for t in terms:
        if t != fzero:
            acc = mpf_add(acc, t, MAG_PREC, round_ceiling)
    return acc


def _rmul(a, b):
    if a == fzero or b == fzero:
        return fzero
    return mpf_mul(a, b, MAG_PREC, round_ceiling)


def _round_exact(x, prec: int):
    """Round exact value x to prec bits; return (rounded, error upper bound)."""
    y = mpf_pos(x, prec, round_nearest)
    if y == x:
        return y, fzero
    return y, _rup(mpf_abs(mpf_sub(x, y)))


def _to_fraction(x) -> Fraction:
    p, q = to_rational(x)
    return Fraction(int(p), int(q))


def _from_number(x, prec: int):
    """Convert an exact Python number to (mid, rad) raw tuples."""
    if isinstance(x, bool):
        x = int(x)
    if isinstance(x, int):
        return from_int(x), fzero
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"non-finite value {x!r}")
        return from_float(x), fzero
    if isinstance(x, mpf):
        return x._mpf_, fzero
    if isinstance(x, str):
        x = Fraction(x)
    if isinstance(x, Rational):
        p, q = int(x.numerator), int(x.denominator)
        if q & (q - 1) == 0:
            return libmp.from_man_exp(p, -(q.bit_length() - 1)), fzero
        mid = from_rational(p, q, prec, round_nearest)
        return mid, _ulp_bound(mid, prec)
    raise TypeError(f"cannot convert {type(x).__name__} to Ball")


def _radius_from_number(x):
    if isinstance(x, str):
        x = Fraction(x)
    if isinstance(x, Rational) and not isinstance(x, (int, bool)):
        if x < 0:
            raise ValueError("radius must be nonnegative")
        return from_rational(int(x.numerator), int(x.denominator), MAG_PREC, round_ceiling)
    r, _ = _from_number(x, MAG_PREC)
    if mpf_lt(r, fzero):
        raise ValueError("radius must be nonnegative")
    return _rup(r) if r != fzero else r


# -- Ball ----------------------------------------------------------------------------


class Ball:
    """Real ball ``[mid - rad, mid + rad]`` at working precision ``prec``."""

    __slots__ = ("_mid", "_rad", "prec")

    def __init__(self, mid=0, rad=0, prec: int = DEFAULT_PREC):
        m, err = _from_number(mid, prec)
        r = _radius_from_number(rad)
        self._mid = m
        self._rad = _radd(r, err)
        self.prec = prec

    @classmethod
    def _raw(cls, mid, rad, prec: int) -> "Ball":
        b = cls.__new__(cls)
        b._mid = mid
        b._rad = rad
        b.prec = prec
        return b

    @classmethod
    def from_interval(cls, lo, hi, prec: int) -> "Ball":
        """Smallest-ish ball covering the raw interval [lo, hi]."""
        centre = mpf_shift(mpf_add(lo, hi), -1)
        mid, err = _round_exact(centre, prec)
        half = mpf_shift(mpf_sub(hi, lo), -1)
        return cls._raw(mid, _radd(_rup(half), err), prec)

    @classmethod
    def exact(cls, value, prec: int = DEFAULT_PREC) -> "Ball":
        return cls(value, 0, prec)

    # -- accessors

    @property
    def mid(self) -> mpf:
        return mpf(self._mid)

    @property
    def rad(self) -> mpf:
        return mpf(self._rad)

    def mid_fraction(self) -> Fraction:
        return _to_fraction(self._mid)

    def rad_fraction(self) -> Fraction:
        return _to_fraction(self._rad)

    def lower(self) -> mpf:
        return mpf(mpf_sub(self._mid, self._rad, self.prec + 8, round_floor))

    def upper(self) -> mpf:
        return mpf(mpf_add(self._mid, self._rad, self.prec + 8, round_ceiling))

    def is_exact(self) -> bool:
        return self._rad == fzero

    # -- predicates (evaluated exactly in rationals)

    def contains(self, x) -> bool:
        if isinstance(x, Ball):
            return abs(x.mid_fraction() - self.mid_fraction()) + x.rad_fraction() <= self.rad_fraction()
        return abs(Fraction(x) - self.mid_fraction()) <= self.rad_fraction()

    def contains_zero(self) -> bool:
        return not mpf_lt(self._rad, mpf_abs(self._mid))

    def overlaps(self, other: "Ball") -> bool:
        other = _coerce(other, self.prec)
        gap = abs(self.mid_fraction() - other.mid_fraction())
        return gap <= self.rad_fraction() + other.rad_fraction()

    def is_positive(self) -> bool:
        return mpf_lt(self._rad, self._mid)

    # -- arithmetic

    def __neg__(self) -> "Ball":
        return Ball._raw(mpf_neg(self._mid), self._rad, self.prec)

    def __pos__(self) -> "Ball":
        return self

    def __abs__(self) -> "Ball":
        if self.contains_zero():
            # |x| over [m-r, m+r] lies in [0, |m|+r]
            hi = mpf_add(mpf_abs(self._mid), self._rad, self.prec, round_ceiling)
            return Ball.from_interval(fzero, hi, self.prec)
        return Ball._raw(mpf_abs(self._mid), self._rad, self.prec)

    def __add__(self, other) -> "Ball":
        other = _coerce(other, self.prec)
        if other is NotImplemented:
            return other
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other) -> "Ball":
        other = _coerce(other, self.prec)
        if other is NotImplemented:
            return other
        return add(self, -other)

    def __rsub__(self, other) -> "Ball":
        other = _coerce(other, self.prec)
        if other is NotImplemented:
            return other
        return add(other, -self)

    def __mul__(self, other) -> "Ball":
        other = _coerce(other, self.prec)
        if other is NotImplemented:
            return other
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Ball":
        other = _coerce(other, self.prec)
        if other is NotImplemented:
            return other
        return mul(self, inv(other))

    def __rtruediv__(self, other) -> "Ball":
        other = _coerce(other, self.prec)
        if other is NotImplemented:
            return other
        return mul(other, inv(self))

    def __pow__(self, n: int) -> "Ball":
        return pow_int(self, n)

    def mul_2exp(self, e: int) -> "Ball":
        """Exact scaling by 2**e."""
        return Ball._raw(mpf_shift(self._mid, e), mpf_shift(self._rad, e), self.prec)

    def with_prec(self, prec: int) -> "Ball":
        mid, err = _round_exact(self._mid, prec)
        return Ball._raw(mid, _radd(self._rad, err), prec)

    def __repr__(self) -> str:
        digits = max(10, int(self.prec * 0.30103))
        return f"[{libmp.to_str(self._mid, digits)} +/- {libmp.to_str(self._rad, 5)}]"

    def __float__(self) -> float:
        return libmp.to_float(self._mid)


def _coerce(x, prec: int):
    if isinstance(x, Ball):
        return x
    if isinstance(x, (int, float, Fraction, mpf, str)):
        return Ball(x, 0, prec)
    return NotImplemented


def add(a: Ball, b: Ball) -> Ball:
    prec = max(a.prec, b.prec)
    am, bm = a._mid, b._mid
    if am == fzero or bm == fzero or abs(am[2] - bm[2]) < 4 * prec:
        mid, err = _round_exact(mpf_add(am, bm), prec)
    else:
        mid = mpf_add(am, bm, prec, round_nearest)
        err = _ulp_bound(mid, prec)
    return Ball._raw(mid, _radd(a._rad, b._rad, err), prec)


def sub(a: Ball, b: Ball) -> Ball:
    return add(a, -b)


def mul(a: Ball, b: Ball) -> Ball:
    prec = max(a.prec, b.prec)
    mid, err = _round_exact(mpf_mul(a._mid, b._mid), prec)
    ra, rb = a._rad, b._rad
    rad = _radd(
        _rmul(_rup(mpf_abs(a._mid)), rb),
        _rmul(_rup(mpf_abs(b._mid)), ra),
        _rmul(ra, rb),
        err,
    )
    return Ball._raw(mid, rad, prec)


def inv(a: Ball) -> Ball:
    if a.contains_zero():
        raise PossiblyZeroError("division by possibly-zero ball")
    prec = a.prec
    mid = mpf_div(fone, a._mid, prec, round_nearest)
    err = _ulp_bound(mid, prec)
    if a._rad == fzero:
        return Ball._raw(mid, err, prec)
    # sup |1/x - 1/m| over |x - m| <= r is r / (|m| (|m| - r))
    m = mpf_abs(a._mid)
    gap = mpf_sub(m, a._rad, MAG_PREC, round_floor)
    denom = mpf_mul(mpf_pos(m, MAG_PREC, round_floor), gap, MAG_PREC, round_floor)
    prop = mpf_div(a._rad, denom, MAG_PREC, round_ceiling)
    return Ball._raw(mid, _radd(prop, err), prec)


def pow_int(a: Ball, n: int) -> Ball:
    if n == 0:
        return Ball._raw(fone, fzero, a.prec)
    if n < 0:
        return pow_int(inv(a), -n)
    result = None
    base = a
    while n:
        if n & 1:
            result = base if result is None else mul(result, base)
        n >>= 1
        if n:
            base = mul(base, base)
    return result


# -- complex balls -------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class ComplexBall:
    re: Ball
    im: Ball

    @classmethod
    def exact(cls, re, im=0, prec: int = DEFAULT_PREC) -> "ComplexBall":
        return cls(Ball(re, 0, prec), Ball(im, 0, prec))

    @property
    def prec(self) -> int:
        return max(self.re.prec, self.im.prec)

    def __add__(self, other):
        other = _ccoerce(other, self.prec)
        return ComplexBall(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _ccoerce(other, self.prec)
        return ComplexBall(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return _ccoerce(other, self.prec) - self

    def __neg__(self):
        return ComplexBall(-self.re, -self.im)

    def __mul__(self, other):
        if isinstance(other, Ball):
            return ComplexBall(self.re * other, self.im * other)
        if isinstance(other, (int, Fraction)):
            b = Ball(other, 0, self.prec)
            return ComplexBall(self.re * b, self.im * b)
        other = _ccoerce(other, self.prec)
        a, b, c, d = self.re, self.im, other.re, other.im
        return ComplexBall(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (Ball, int, Fraction)):
            b = _coerce(other, self.prec)
            q = inv(b)
            return ComplexBall(self.re * q, self.im * q)
        return self * _ccoerce(other, self.prec).inv()

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        result = ComplexBall.exact(1, 0, self.prec)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def conj(self) -> "ComplexBall":
        return ComplexBall(self.re, -self.im)

    def abs2(self) -> Ball:
        return self.re * self.re + self.im * self.im

    def inv(self) -> "ComplexBall":
        q = inv(self.abs2())
        return ComplexBall(self.re * q, -self.im * q)

    def contains_zero(self) -> bool:
        return self.re.contains_zero() and self.im.contains_zero()

    def contains(self, z) -> bool:
        """Membership of an exact point given as a complex or an (re, im) pair."""
        re, im = (z.real, z.imag) if isinstance(z, complex) else z
        return self.re.contains(re) and self.im.contains(im)

    def overlaps(self, other: "ComplexBall") -> bool:
        return self.re.overlaps(other.re) and self.im.overlaps(other.im)

    def max_rad(self) -> mpf:
        return max(self.re.rad, self.im.rad)

    def __repr__(self) -> str:
        return f"({self.re!r} + {self.im!r}i)"

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))


def _permutation_sign(perm: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def det(matrix: list[list[ComplexBall]]) -> ComplexBall:
    """Leibniz expansion; adequate for the small (N <= 6) matrices used here."""
    N = len(matrix)
    prec = matrix[0][0].prec
    total = ComplexBall.exact(0, 0, prec)
    for perm in permutations(range(N)):
        term = matrix[0][perm[0]]
        for i in range(1, N):
            term = term * matrix[i][perm[i]]
        total = total + term if _permutation_sign(perm) > 0 else total - term
    return total


def _ccoerce(x, prec: int) -> ComplexBall:
    if isinstance(x, ComplexBall):
        return x
    if isinstance(x, Ball):
        return ComplexBall(x, Ball(0, 0, x.prec))
    if isinstance(x, complex):
        return ComplexBall(Ball(x.real, 0, prec), Ball(x.imag, 0, prec))
    return ComplexBall(Ball(x, 0, prec), Ball(0, 0, prec))


# -- transcendental enclosures --------------------------------------------------------

_local = threading.local()


def interval_context(prec: int) -> MPIntervalContext:
    # mpmath contexts carry mutable precision, so each thread gets its own
    ctx = getattr(_local, "ctx", None)
    if ctx is None:
        ctx = _local.ctx = MPIntervalContext()
    ctx.prec = prec
    return ctx


def _iv_ball(x, prec: int) -> Ball:
    lo, hi = x._mpi_
    return Ball.from_interval(lo, hi, prec)


@lru_cache(maxsize=65536)
def two_sin_pi_rational(m: int, n: int, prec: int = DEFAULT_PREC) -> Ball:
    """Ball containing ``2*sin(pi*m/n)``.

    The argument is folded into [0, pi/2] first; 0, pi/6 and pi/2 give exact
    balls (0, 1 and 2).
    """
    if n == 0:
        raise ValueError("invalid denominator")
    if n < 0:
        m, n = -m, -n
    m %= 2 * n
    sign = 1
    if m >= n:
        m -= n
        sign = -1
    if 2 * m > n:
        m = n - m
    # now 0 <= m/n <= 1/2
    if m == 0:
        return Ball._raw(fzero, fzero, prec)
    if 6 * m == n:
        val = 1
    elif 2 * m == n:
        val = 2
    else:
        ctx = interval_context(prec + 20)
        b = _iv_ball(2 * ctx.sin(ctx.pi * m / n), prec)
        return b if sign > 0 else -b
    return Ball(sign * val, 0, prec)


@lru_cache(maxsize=65536)
def exp_2pi_i_rational(num: int, den: int, prec: int = DEFAULT_PREC) -> ComplexBall:
    """Ball containing ``exp(2*pi*i*num/den)``."""
    if den == 0:
        raise ValueError("invalid denominator")
    if den < 0:
        num, den = -num, -den
    num %= den
    # cos(2 pi x) = sin(pi (1/2 - 2x)); both routed through the folded sine
    re = two_sin_pi_rational(den - 4 * num, 2 * den, prec).mul_2exp(-1)
    im = two_sin_pi_rational(2 * num, den, prec).mul_2exp(-1)
    return ComplexBall(re, im)


def exp_neg_pi(y: Fraction, prec: int = DEFAULT_PREC) -> Ball:
    """Ball containing ``exp(-pi*y)`` for exact rational y."""
    y = Fraction(y)
    if y == 0:
        return Ball(1, 0, prec)
    ctx = interval_context(prec + 20)
    arg = ctx.pi * ctx.mpf(y.numerator) / ctx.mpf(y.denominator)
    return _iv_ball(ctx.exp(-arg), prec)


def exp_i_pi(x: tuple[Fraction, Fraction], prec: int = DEFAULT_PREC) -> ComplexBall:
    """Ball containing ``exp(pi*i*x)`` for an exact complex x = (re, im)."""
    re, im = Fraction(x[0]), Fraction(x[1])
    # exp(pi i re) = exp(2 pi i * re/2)
    half = re / 2
    phase = exp_2pi_i_rational(half.numerator, half.denominator, prec)
    if im == 0:
        return phase
    return phase * exp_neg_pi(im, prec)


# -- certified rounding --------------------------------------------------------------


@dataclass(frozen=True)
class CertifiedInteger:
    """An integer together with the ball it was recovered from."""

    value: int
    source: Ball
    margin: mpf  # 1/2 - |mid - value| - rad, rounded down

    @property
    def precision_bits(self) -> int:
        return self.source.prec

    def __int__(self) -> int:
        return self.value

    def __eq__(self, other):
        if isinstance(other, CertifiedInteger):
            return self.value == other.value
        if isinstance(other, int):
            return self.value == other
        return NotImplemented

    def __hash__(self):
        return hash(self.value)


def certify_integer(x: Ball) -> CertifiedInteger:
    mid = x.mid_fraction()
    v = math.floor(mid + Fraction(1, 2))
    slack = Fraction(1, 2) - abs(mid - v) - x.rad_fraction()
    if slack <= 0:
        raise CertificationError("certification failed; increase precision")
    margin = mpf(from_rational(slack.numerator, slack.denominator, 53, round_floor))
    return CertifiedInteger(int(v), x, margin)


def escalate(compute, prec: int | None = None, max_prec: int = MAX_PREC, magnitude_bits: int = 0):
    """Run ``compute(prec)``, doubling ``prec`` on certification failure.

    The initial precision defaults to ``64 + magnitude_bits``. Each retry
    recomputes from scratch.
    """
    if prec is None:
        prec = 64 + max(0, magnitude_bits)
    prec = max(2, min(prec, max_prec))
    while True:
        try:
            return compute(prec)
        except (CertificationError, PossiblyZeroError) as exc:
            if prec >= max_prec:
                raise PrecisionExhausted(f"precision exhausted at {prec} bits") from exc
            prec = min(2 * prec, max_prec)
