"""Certified Verlinde numbers and Quot-scheme intersection numbers.

Every public evaluator returns a :class:`CertifiedInteger`. Rational prefactors
are never pushed into ball arithmetic: the transcendental sum is scaled by an
integer until the result is an integer, certified, and then divided exactly.
The identity checks compare cross-multiplied integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Callable, Sequence

from .certball import (
    MAX_PREC,
    Ball,
    CertifiedInteger,
    ComplexBall,
    certify_integer,
    det,
    escalate,
    exp_2pi_i_rational,
    pow_int,
    inv,
    two_sin_pi_rational,
)
from .combin import (
    WeightVector,
    enumerate_root_tuples,
    enumerate_subset_splits,
    enumerate_weight_vectors,
)

# bialternant determinants are expanded over all N! permutations
MAX_CONFORMAL_RANK = 6
MAX_CONFORMAL_TERMS = 2_000_000


class FormulaInconsistency(ArithmeticError):
    """A certified quantity contradicts a structural property of its formula."""


class ParameterTooLarge(ValueError):
    pass


def _require(cond: bool, what: str) -> None:
    if not cond:
        raise ValueError(f"invalid parameters: {what}")


def _is_int(*xs) -> bool:
    return all(isinstance(x, int) and not isinstance(x, bool) for x in xs)


@dataclass(frozen=True)
class RankLevelParams:
    r: int
    k: int
    g: int

    def __post_init__(self):
        _require(_is_int(self.r, self.k, self.g), "r, k, g must be integers")
        _require(self.r >= 1, "rank r >= 1")
        _require(self.k >= 0, "level k >= 0")
        _require(self.g >= 1, "genus g >= 1")

    @property
    def gbar(self) -> int:
        return self.g - 1


@dataclass(frozen=True)
class QuotParams:
    """Degree bookkeeping for Quot_d(O^{r+k}, k, C); the intersection number
    itself does not depend on d."""

    base: RankLevelParams
    d: int

    def __post_init__(self):
        _require(self.base.k >= 1, "Quot scheme needs subsheaf rank k >= 1")
        _require(self.d % self.base.k == 0, "d divisible by k")

    @property
    def s(self) -> int:
        r, k, gbar = self.base.r, self.base.k, self.base.gbar
        return (r + k) * (self.d // k) - r * gbar

    @property
    def expected_dimension(self) -> int:
        r, k, gbar = self.base.r, self.base.k, self.base.gbar
        return (r + k) * self.d - r * k * gbar


@dataclass(frozen=True)
class ArbDegreeParams:
    h: int
    k: int
    r: int
    d: int
    g: int

    def __post_init__(self):
        _require(_is_int(self.h, self.k, self.r, self.d, self.g), "integers required")
        _require(self.h >= 1, "h >= 1")
        _require(self.k >= 0, "k >= 0")
        _require(self.r >= 2, "r >= 2")
        _require(0 < self.d < self.r, "0 < d < r")
        _require(math.gcd(self.r, self.d) == 1, "gcd(r, d) = 1")
        _require(self.g >= 1, "g >= 1")

    @property
    def gbar(self) -> int:
        return self.g - 1

    @property
    def total_rank(self) -> int:
        """Rank r(h+k) of the trivial bundle on the Quot side."""
        return self.r * (self.h + self.k)

    def quot_degree_exponent(self, e: int) -> tuple[int, int]:
        """(degree ke, exponent (h+k)e - hr*gbar) for a choice e = -d mod r."""
        _require((e + self.d) % self.r == 0, "e = -d mod r")
        return self.k * e, (self.h + self.k) * e - self.h * self.r * self.gbar


@dataclass(frozen=True)
class IdentityReport:
    """Outcome of an exact integer identity check."""

    name: str
    holds: bool
    lhs: int
    rhs: int
    lhs_expr: str
    rhs_expr: str
    precision_bits: int
    values: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.holds

    def __str__(self) -> str:
        rel = "=" if self.holds else "!="
        return f"{self.lhs_expr} {rel} {self.rhs_expr}"


# -- shared machinery ---------------------------------------------------------------


@lru_cache(maxsize=512)
def sine_table(n: int, prec: int) -> tuple[Ball, ...]:
    """|2 sin(pi j/n)| for j = 0..n-1, computed once per (n, prec)."""
    return tuple(two_sin_pi_rational(j, n, prec) for j in range(n))


def _bits(x: float) -> int:
    return max(0, math.ceil(math.log2(x))) if x > 1 else 0


def _divide_certified(scaled: Ball, denominator: int) -> CertifiedInteger:
    """Certify ``scaled`` (an integer multiple of ``denominator``) and divide."""
    num = certify_integer(scaled)
    q, rem = divmod(num.value, denominator)
    if rem:
        raise FormulaInconsistency(
            f"internal error: certified value {num.value} not divisible by {denominator}"
        )
    if denominator == 1:
        return num
    out = certify_integer(scaled / denominator)
    if out.value != q:
        raise FormulaInconsistency("internal error: exact division disagrees with ball")
    return out


def _real_part_certified(z: ComplexBall, denominator: int = 1) -> CertifiedInteger:
    if certify_integer(z.im).value != 0:
        raise FormulaInconsistency("internal error: formula implementation inconsistent")
    return _divide_certified(z.re, denominator)


def _pair_product(points: Sequence[int], table: tuple[Ball, ...], prec: int) -> Ball:
    """Product of |2 sin(pi (b-a)/n)| over pairs a < b of ``points``."""
    prod = Ball(1, 0, prec)
    for a, b in combinations(points, 2):
        prod = prod * table[b - a]
    return prod


# -- degree zero ---------------------------------------------------------------------


def _verlinde_su_scaled(p: RankLevelParams, prec: int) -> Ball:
    """r^g * sum over splits of prod |2 sin pi(s-t)/(r+k)|^gbar."""
    n = p.r + p.k
    table = sine_table(n, prec)
    total = Ball(0, 0, prec)
    for split in enumerate_subset_splits(n, p.k):
        prod = Ball(1, 0, prec)
        for s in split.S:
            for t in split.T:
                prod = prod * table[abs(s - t)]
        total = total + pow_int(prod, p.gbar)
    return total * p.r**p.g


def verlinde_su(p: RankLevelParams, prec: int | None = None, max_prec: int = MAX_PREC) -> CertifiedInteger:
    """h^0(SU(r, 0), theta_r^k) from the sine-product form of the Verlinde formula."""
    n = p.r + p.k
    est = p.r**p.g * math.comb(n, p.k) * 2.0 ** (p.k * p.r * p.gbar)
    return escalate(
        lambda pr: _divide_certified(_verlinde_su_scaled(p, pr), n**p.g),
        prec,
        max_prec,
        _bits(est),
    )


def _quot_estimate_bits(n: int, k: int, gbar: int) -> int:
    return _bits(float(n) ** (k * gbar + 1) * math.comb(n, k))


def _quot_subset_ball(n: int, k: int, gbar: int, prec: int) -> Ball:
    table = sine_table(n, prec)
    total = Ball(0, 0, prec)
    for split in enumerate_subset_splits(n, k):
        S = split.S
        if gbar == 0:
            total = total + 1
        else:
            total = total + pow_int(inv(_pair_product(S, table, prec)), 2 * gbar)
    return total * n ** (k * gbar)


def quot_intersection(p: RankLevelParams, prec: int | None = None, max_prec: int = MAX_PREC) -> CertifiedInteger:
    """Top intersection of a_k on Quot_d(O^{r+k}, k, C), subset form of Vafa-Intriligator."""
    _require(p.k >= 1, "k >= 1")
    n = p.r + p.k
    return escalate(
        lambda pr: _divide_certified(_quot_subset_ball(n, p.k, p.gbar, pr), 1),
        prec,
        max_prec,
        _quot_estimate_bits(n, p.k, p.gbar),
    )


def _quot_roots_ball(p: RankLevelParams, prec: int) -> ComplexBall:
    n, k, gbar = p.r + p.k, p.k, p.gbar
    total = ComplexBall.exact(0, 0, prec)
    for tup in enumerate_root_tuples(n, k):
        prod = ComplexBall.exact(1, 0, prec)
        for ai, aj in combinations(tup.exponents, 2):
            # (l_i/l_j)^{1/2} on the fixed branch exp(pi i (a_i - a_j)/n)
            up = exp_2pi_i_rational(ai - aj, 2 * n, prec)
            down = exp_2pi_i_rational(aj - ai, 2 * n, prec)
            prod = prod * (up - down)
        total = total + prod ** (-2 * gbar)
    sign = -1 if (gbar * math.comb(k, 2)) % 2 else 1
    return total * (sign * n ** (k * gbar))


def quot_intersection_roots(p: RankLevelParams, prec: int | None = None, max_prec: int = MAX_PREC) -> CertifiedInteger:
    """Same number as :func:`quot_intersection`, summed over distinct roots of unity.

    Each unordered tuple of distinct roots is counted once.
    """
    _require(p.k >= 1, "k >= 1")
    n = p.r + p.k
    return escalate(
        lambda pr: _real_part_certified(_quot_roots_ball(p, pr)),
        prec,
        max_prec,
        _quot_estimate_bits(n, p.k, p.gbar),
    )


# -- identity checks in degree zero --------------------------------------------------


def check_prop31(p: RankLevelParams, prec: int | None = None, max_prec: int = MAX_PREC) -> IdentityReport:
    """(r+k)^g * h^0(SU(r,0), theta^k) = r^g * Quot intersection."""
    _require(p.k >= 1, "k >= 1")
    v = verlinde_su(p, prec, max_prec)
    q = quot_intersection(p, prec, max_prec)
    n, r, g = p.r + p.k, p.r, p.g
    lhs, rhs = n**g * v.value, r**g * q.value
    return IdentityReport(
        "prop31", lhs == rhs, lhs, rhs,
        f"{n}^{g}*{v.value}", f"{r}^{g}*{q.value}",
        max(v.precision_bits, q.precision_bits),
        {"verlinde_su": v.value, "quot": q.value},
    )


def check_rank_level_symmetry(r: int, k: int, g: int, prec: int | None = None, max_prec: int = MAX_PREC) -> IdentityReport:
    """k^g * V(r, k, g) = r^g * V(k, r, g)."""
    _require(r >= 1 and k >= 1, "r, k >= 1")
    a = verlinde_su(RankLevelParams(r, k, g), prec, max_prec)
    b = verlinde_su(RankLevelParams(k, r, g), prec, max_prec)
    lhs, rhs = k**g * a.value, r**g * b.value
    return IdentityReport(
        "rank-level", lhs == rhs, lhs, rhs,
        f"{k}^{g}*{a.value}", f"{r}^{g}*{b.value}",
        max(a.precision_bits, b.precision_bits),
        {"verlinde_su": a.value, "verlinde_su_swapped": b.value},
    )


def check_st_symmetry(r: int, k: int, g: int, prec: int | None = None, max_prec: int = MAX_PREC) -> IdentityReport:
    """Quot(r, k, g) = Quot(k, r, g)."""
    _require(r >= 1 and k >= 1, "r, k >= 1")
    a = quot_intersection(RankLevelParams(r, k, g), prec, max_prec)
    b = quot_intersection(RankLevelParams(k, r, g), prec, max_prec)
    return IdentityReport(
        "st-sym", a.value == b.value, a.value, b.value,
        str(a.value), str(b.value),
        max(a.precision_bits, b.precision_bits),
        {"quot": a.value, "quot_swapped": b.value},
    )


def check_vi_forms(p: RankLevelParams, prec: int | None = None, max_prec: int = MAX_PREC) -> IdentityReport:
    """Subset form and roots form of Vafa-Intriligator agree."""
    a = quot_intersection(p, prec, max_prec)
    b = quot_intersection_roots(p, prec, max_prec)
    return IdentityReport(
        "vi-forms", a.value == b.value, a.value, b.value,
        str(a.value), str(b.value),
        max(a.precision_bits, b.precision_bits),
        {"quot_subsets": a.value, "quot_roots": b.value},
    )


# -- arbitrary degree ----------------------------------------------------------------


def _arbitrary_sign(h: int, r: int, d: int) -> int:
    return -1 if (h * d * (r - 1)) % 2 else 1


def _verlinde_arbitrary_ball(h: int, k: int, r: int, d: int, g: int, prec: int) -> ComplexBall:
    """(-1)^{hd(r-1)} h^g * sum over |T| = hr of e(d/r sum T) prod_{S x T} |2 sin|^gbar.

    No validation of d: callers outside the public API use this to probe
    d outside (0, r).
    """
    n, gbar = r * (h + k), g - 1
    table = sine_table(n, prec)
    total = ComplexBall.exact(0, 0, prec)
    # the split's first part plays the role of T here
    for split in enumerate_subset_splits(n, h * r):
        T, S = split.S, split.T
        prod = Ball(1, 0, prec)
        for s in S:
            for t in T:
                prod = prod * table[abs(s - t)]
        phase = exp_2pi_i_rational(d * sum(T), r, prec)
        total = total + phase * pow_int(prod, gbar)
    return total * (_arbitrary_sign(h, r, d) * h**g)


def _verlinde_arbitrary(h: int, k: int, r: int, d: int, g: int, prec, max_prec) -> CertifiedInteger:
    n = r * (h + k)
    est = h**g * math.comb(n, h * r) * 2.0 ** (h * r * k * r * (g - 1))
    return escalate(
        lambda pr: _real_part_certified(_verlinde_arbitrary_ball(h, k, r, d, g, pr), (h + k) ** g),
        prec,
        max_prec,
        _bits(est),
    )


def verlinde_arbitrary(p: ArbDegreeParams, prec: int | None = None, max_prec: int = MAX_PREC) -> CertifiedInteger:
    """h^0(SU(hr, hd), theta_{hr}^k) from the arbitrary-degree sine-product formula.

    The imaginary part of the phase-weighted sum must certify to zero.
    """
    return _verlinde_arbitrary(p.h, p.k, p.r, p.d, p.g, prec, max_prec)


def _twisted_quot_ball(n: int, size: int, gbar: int, num: int, den: int, sign: int, prec: int) -> ComplexBall:
    """sign * n^{size*gbar} * sum_{|A|=size} e(num/den sum A) prod_{a<b} (2 sin)^{-2gbar}."""
    table = sine_table(n, prec)
    total = ComplexBall.exact(0, 0, prec)
    for split in enumerate_subset_splits(n, size):
        A = split.S
        phase = exp_2pi_i_rational(num * sum(A), den, prec)
        if gbar == 0:
            total = total + phase
        else:
            total = total + phase * pow_int(inv(_pair_product(A, table, prec)), 2 * gbar)
    return total * (sign * n ** (size * gbar))


def quot_intersection_arbitrary(
    p: ArbDegreeParams, dual: bool = False, prec: int | None = None, max_prec: int = MAX_PREC
) -> CertifiedInteger:
    """Intersection number on Quot_{ke}(O^{r(h+k)}, kr, C) with e = -d mod r.

    Unlike degree zero this carries the character exp(-2 pi i (d/r) sum S)
    over kr-subsets S. With ``dual=True`` the same number is computed from
    the complementary hr-subsets T with character exp(+2 pi i (d/r) sum T).
    """
    _require(p.k >= 1, "k >= 1")
    n, h, k, r, d = p.total_rank, p.h, p.k, p.r, p.d
    base = h * d * (r - 1)
    if dual:
        size, num, parity = h * r, d, base
    else:
        size, num, parity = k * r, -d, base + d * (h + k) * (n - 1)
    sign = -1 if parity % 2 else 1
    return escalate(
        lambda pr: _real_part_certified(_twisted_quot_ball(n, size, p.gbar, num, r, sign, pr)),
        prec,
        max_prec,
        _quot_estimate_bits(n, size, p.gbar),
    )


def check_prop52(p: ArbDegreeParams, prec: int | None = None, max_prec: int = MAX_PREC) -> IdentityReport:
    """(h+k)^g * h^0(SU(hr, hd), theta^k) = h^g * (degree-ke Quot intersection)."""
    _require(p.k >= 1, "k >= 1")
    v = verlinde_arbitrary(p, prec, max_prec)
    q = quot_intersection_arbitrary(p, prec=prec, max_prec=max_prec)
    h, k, g = p.h, p.k, p.g
    lhs, rhs = (h + k) ** g * v.value, h**g * q.value
    return IdentityReport(
        "prop52", lhs == rhs, lhs, rhs,
        f"{h + k}^{g}*{v.value}", f"{h}^{g}*{q.value}",
        max(v.precision_bits, q.precision_bits),
        {"verlinde_arbitrary": v.value, "quot_arbitrary": q.value},
    )


def check_arbitrary_quot_sides(p: ArbDegreeParams, prec: int | None = None, max_prec: int = MAX_PREC) -> IdentityReport:
    """The kr-subset and hr-subset evaluations give the same Quot number."""
    a = quot_intersection_arbitrary(p, prec=prec, max_prec=max_prec)
    b = quot_intersection_arbitrary(p, dual=True, prec=prec, max_prec=max_prec)
    return IdentityReport(
        "quot-sides", a.value == b.value, a.value, b.value,
        str(a.value), str(b.value),
        max(a.precision_bits, b.precision_bits),
        {"quot_subsheaf_side": a.value, "quot_quotient_side": b.value},
    )


# -- conformal blocks ------------------------------------------------------------------


def _pad_partition(lam: Sequence[int], N: int) -> tuple[int, ...]:
    lam = tuple(lam)
    if len(lam) > N or any(x < 0 for x in lam) or any(a < b for a, b in zip(lam, lam[1:])):
        raise ValueError(f"not a partition with at most {N} parts: {lam}")
    return lam + (0,) * (N - len(lam))


def _bialternant(power: Callable[[int, int], ComplexBall], lam: tuple[int, ...], N: int) -> ComplexBall:
    num = det([[power(j, lam[i] + N - 1 - i) for j in range(N)] for i in range(N)])
    den = None
    for i, j in combinations(range(N), 2):
        diff = power(i, 1) - power(j, 1)
        den = diff if den is None else den * diff
    try:
        return num / den
    except ZeroDivisionError as exc:
        raise FormulaInconsistency("internal error: coincident evaluation points") from exc


def schur_bialternant(xs: Sequence[ComplexBall], lam: Sequence[int]) -> ComplexBall:
    """s_lam(x_1..x_N) as det(x_j^{lam_i + N - i}) / prod_{i<j} (x_i - x_j)."""
    N = len(xs)
    lam = _pad_partition(lam, N)
    if not any(lam):
        return ComplexBall.exact(1, 0, xs[0].prec)
    return _bialternant(lambda j, e: xs[j] ** e, lam, N)


def weyl_trace(nu: WeightVector, lam: Sequence[int], n: int, prec: int) -> ComplexBall:
    """Character of the sl_N irrep lam at diag(exp(2 pi i nu_j / n)).

    Powers x_j^e are evaluated directly as exp(2 pi i e (N t_j - sum t) / (N n)),
    never by repeated multiplication.
    """
    N = nu.N
    lam = _pad_partition(lam, N)
    if not any(lam):
        return ComplexBall.exact(1, 0, prec)
    shift = sum(nu.t)

    def power(j: int, e: int) -> ComplexBall:
        return exp_2pi_i_rational(e * (N * nu.t[j] - shift), N * n, prec)

    return _bialternant(power, lam, N)


def _conformal_ball(p: ArbDegreeParams, prec: int) -> ComplexBall:
    N, n, gbar = p.h * p.r, p.total_rank, p.gbar
    lam = (p.k * p.r,) * (p.h * p.r - p.h * p.d)
    table = sine_table(n, prec)
    total = ComplexBall.exact(0, 0, prec)
    for wv in enumerate_weight_vectors(N, n):
        trace = weyl_trace(wv, lam, n, prec)
        if gbar:
            trace = trace * pow_int(inv(_pair_product(wv.t[::-1], table, prec)), 2 * gbar)
        total = total + trace
    return total * (n ** (N * gbar) * p.h**gbar)


def conformal_block_dim(p: ArbDegreeParams, prec: int | None = None, max_prec: int = MAX_PREC) -> CertifiedInteger:
    """Dimension of sl_{hr} conformal blocks at level kr with weight kr(e_1+...+e_{hr-hd}).

    The prefactor (h/(h+k))^gbar is applied exactly: the scaled sum is
    certified, then divided by (h+k)^gbar.
    """
    N, n = p.h * p.r, p.total_rank
    count = math.comb(n - 1, N - 1)
    if N > MAX_CONFORMAL_RANK or count * math.factorial(N) > MAX_CONFORMAL_TERMS:
        raise ParameterTooLarge("parameter too large")
    est = float(n) ** (N * p.gbar + 1) * count * 2.0**N * p.h**p.gbar
    return escalate(
        lambda pr: _real_part_certified(_conformal_ball(p, pr), (p.h + p.k) ** p.gbar),
        prec,
        max_prec,
        _bits(est),
    )
