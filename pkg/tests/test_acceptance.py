"""Acceptance criteria, one test per criterion.

Each test appends a PASS/FAIL line that is printed in the terminal summary.
Integer outputs of criteria 1-8 are kept so criterion 11 can recompute them
from a 16-bit start and compare.
"""

import math
import random
import time
from fractions import Fraction

import mpmath
import pytest

from conftest import ACCEPTANCE_LINES, oracle_theta00
from verlinde_cert.certball import Ball, certify_integer, escalate, exp_i_pi, two_sin_pi_rational
from verlinde_cert.theta import (
    ModulusPoint,
    addition_residual,
    duality_matrix_rk1,
    theta00,
)
from verlinde_cert.verlinde import (
    ArbDegreeParams,
    RankLevelParams,
    conformal_block_dim,
    quot_intersection,
    quot_intersection_roots,
    verlinde_arbitrary,
    verlinde_su,
)

BASELINE: dict[int, dict] = {}


def _record(number, title, ok, detail=""):
    tag = "PASS" if ok else "FAIL"
    ACCEPTANCE_LINES.append(f"[{tag}] criterion {number:>2}: {title}" + (f" ({detail})" if detail else ""))


def _valid_d(r):
    return [d for d in range(1, r) if math.gcd(r, d) == 1]


def V(r, k, g, prec=None):
    return verlinde_su(RankLevelParams(r, k, g), prec).value


def Q(r, k, g, prec=None):
    return quot_intersection(RankLevelParams(r, k, g), prec).value


# -- integer computations, parametrised by initial precision --------------------------


def _c1(prec):
    return {(r, k, g): V(r, k, g, prec) for r in range(1, 6) for k in range(0, 6) for g in range(1, 5)}


def _c2(prec):
    return {(r, k, g): (V(r, k, g, prec), Q(r, k, g, prec)) for r in range(1, 6) for k in range(1, 6) for g in range(1, 5)}


def _c3(prec):
    return {
        (r, k, g): (Q(r, k, g, prec), Q(k, r, g, prec), V(r, k, g, prec), V(k, r, g, prec))
        for r in range(1, 6)
        for k in range(1, 6)
        for g in range(1, 5)
    }


def _c4(prec):
    out = {}
    for n in range(2, 9):
        for k in range(1, n):
            for g in range(1, 4):
                p = RankLevelParams(n - k, k, g)
                out[(n - k, k, g)] = (quot_intersection(p, prec).value, quot_intersection_roots(p, prec).value)
    return out


def _c5(prec):
    out = {}
    for g in range(1, 7):
        for n in range(1, 7):
            out[("V1k", n, g)] = V(1, n, g, prec)
            out[("Vr0", n, g)] = V(n, 0, g, prec)
            out[("Qr1", n, g)] = Q(n, 1, g, prec)
        out[("V21", g)] = V(2, 1, g, prec)
    for r in range(1, 7):
        for k in range(1, 7):
            out[("Vg1", r, k)] = V(r, k, 1, prec)
            out[("Qg1", r, k)] = Q(r, k, 1, prec)
    return out


def _sine_product(n, prec):
    def compute(p):
        prod = Ball(1, 0, p)
        for m in range(1, n):
            prod = prod * two_sin_pi_rational(m, n, p)
        return certify_integer(prod)

    return escalate(compute, prec).value


def _c6(prec):
    return {n: _sine_product(n, prec) for n in range(2, 51)}


def _c7(prec):
    out = {}
    for h in (1, 2):
        for k in (1, 2):
            for r in (2, 3):
                for g in (1, 2):
                    q = Q(h * r, k * r, g, prec)
                    for d in _valid_d(r):
                        out[(h, k, r, d, g)] = (verlinde_arbitrary(ArbDegreeParams(h, k, r, d, g), prec).value, q)
    return out


def _c8(prec):
    out = {}
    for k in (0, 1):
        for r in (2, 3):
            for d in _valid_d(r):
                for g in (1, 2):
                    p = ArbDegreeParams(1, k, r, d, g)
                    out[(k, r, d, g)] = (conformal_block_dim(p, prec).value, verlinde_arbitrary(p, prec).value)
    return out


COMPUTATIONS = {1: _c1, 2: _c2, 3: _c3, 4: _c4, 5: _c5, 6: _c6, 7: _c7, 8: _c8}


def _baseline(number):
    if number not in BASELINE:
        BASELINE[number] = COMPUTATIONS[number](None)
    return BASELINE[number]


# -- criteria -------------------------------------------------------------------------


def test_criterion_01_verlinde_su_grid():
    start = time.perf_counter()
    BASELINE.pop(1, None)
    values = _baseline(1)
    elapsed = time.perf_counter() - start
    integral = all(isinstance(v, int) for v in values.values())
    ok = integral and len(values) == 5 * 6 * 4 and elapsed < 60
    _record(1, "verlinde_su certifies on 1<=r<=5, 0<=k<=5, 1<=g<=4 in < 60 s", ok, f"{len(values)} values, {elapsed:.2f} s")
    assert ok


def test_criterion_02_prop31():
    values = _baseline(2)
    bad = [key for key, (v, q) in values.items() if (key[0] + key[1]) ** key[2] * v != key[0] ** key[2] * q]
    _record(2, "(r+k)^g V_su = r^g Quot on the grid", not bad, f"{len(values)} tuples, {len(bad)} violations")
    assert not bad, bad


def test_criterion_03_symmetries():
    values = _baseline(3)
    bad = [
        (r, k, g)
        for (r, k, g), (q, qs, v, vs) in values.items()
        if q != qs or k**g * v != r**g * vs
    ]
    _record(3, "Quot(r,k,g) = Quot(k,r,g) and k^g V(r,k,g) = r^g V(k,r,g)", not bad, f"{len(values)} tuples")
    assert not bad, bad


def test_criterion_04_vi_forms():
    values = _baseline(4)
    bad = [key for key, (a, b) in values.items() if a != b]
    _record(4, "subset form = roots form for r+k <= 8, g <= 3", not bad, f"{len(values)} tuples")
    assert not bad, bad


def test_criterion_05_closed_forms():
    values = _baseline(5)
    bad = []
    for key, v in values.items():
        kind = key[0]
        if kind in ("V1k", "Vr0"):
            expected = 1
        elif kind == "Qr1":
            expected = (key[1] + 1) ** key[2]
        elif kind == "V21":
            expected = 2 ** key[1]
        elif kind == "Qg1":
            expected = math.comb(key[1] + key[2], key[2])
        else:
            r, k = key[1], key[2]
            expected = Fraction(r, r + k) * math.comb(r + k, k)
        if v != expected:
            bad.append((key, v, expected))
    _record(5, "closed-form anchors for r,k <= 6, g <= 6", not bad, f"{len(values)} values")
    assert not bad, bad


def test_criterion_06_trig_identity():
    values = _baseline(6)
    bad = [n for n, v in values.items() if v != n]
    _record(6, "prod 2 sin(p pi/n) certifies to n for 2 <= n <= 50", not bad)
    assert not bad, bad


def test_criterion_07_arbitrary_degree():
    values = _baseline(7)
    identity_bad = [
        (key, v, q)
        for key, (v, q) in values.items()
        if (key[0] + key[1]) ** key[4] * v != key[0] ** key[4] * q
    ]
    spot_2 = values[(1, 1, 2, 1, 2)][0]
    spot_1 = values[(1, 1, 2, 1, 1)][0]
    spots_ok = spot_2 == 10 and spot_1 == 3
    ok = not identity_bad and spots_ok
    detail = f"V_arb(1,1,2,1,2) = {spot_2} (expected 10), V_arb(1,1,2,1,1) = {spot_1} (expected 3)"
    if identity_bad:
        (h, k, r, d, g), v, q = identity_bad[0]
        detail += (
            f"; identity fails on {len(identity_bad)}/{len(values)} tuples,"
            f" e.g. {h + k}^{g}*{v} != {h}^{g}*{q} at (h,k,r,d,g) = {(h, k, r, d, g)}"
        )
    _record(7, "V_arb integral, (h+k)^g V_arb = h^g Quot(hr,kr,g), spot values 10 and 3", ok, detail)
    assert spots_ok, detail
    assert not identity_bad, detail


def test_criterion_08_conformal_blocks():
    values = _baseline(8)
    bad = [key for key, (c, v) in values.items() if c != v]
    _record(8, "conformal_block_dim = verlinde_arbitrary for h=1, k in {0,1}, r in {2,3}, g <= 2", not bad,
            f"{len(values)} tuples")
    assert not bad, bad


def _sample_points(rng, count):
    def q(lo, hi, denom=4096):
        return Fraction(rng.randint(int(lo * denom), int(hi * denom)), denom)

    for _ in range(count):
        tau = (q(-1, 1), q(0.5, 2))
        yield tau, (q(-1, 1), q(-0.5, 0.5)), (q(-1, 1), q(-0.5, 0.5))


def test_criterion_09_theta_suite():
    tv = theta00(ModulusPoint("i"), 128).value
    oracle = oracle_theta00(1j, 0)
    with mpmath.workdps(40):
        err_oracle = abs(tv.re.mid - mpmath.re(oracle)) + tv.re.rad
        err_literal = abs(tv.re.mid - mpmath.mpf("1.086434811213308")) + tv.re.rad
    value_ok = err_oracle < 1e-14 and err_literal < 1e-14 and tv.im.contains(0)

    rng = random.Random(20240601)
    add_fail = quasi_fail = even_fail = 0
    for tau, z, w in _sample_points(rng, 50):
        if not addition_residual(tau, z, w, 128).contains_zero():
            add_fail += 1
        t = theta00(ModulusPoint(tau, z), 128).value
        shifted = theta00(ModulusPoint(tau, (z[0] + tau[0], z[1] + tau[1])), 128).value
        factor = exp_i_pi((-tau[0] - 2 * z[0], -tau[1] - 2 * z[1]), 128)
        if not (shifted - factor * t).contains_zero():
            quasi_fail += 1
        if not (theta00(ModulusPoint(tau, (-z[0], -z[1])), 128).value - t).contains_zero():
            even_fail += 1
    ok = value_ok and add_fail == quasi_fail == even_fail == 0
    _record(
        9, "theta00(i, 0) = 1.086434811213308 within 1e-14; addition, quasi-periodicity, evenness on 50 samples", ok,
        f"|theta - oracle| + rad = {mpmath.nstr(err_oracle, 3)}; failures {add_fail}/{quasi_fail}/{even_fail}",
    )
    assert ok


@pytest.mark.parametrize("tau", ["i", "2i", "1+2i"])
def test_criterion_10_duality_diagonal(tau):
    m = duality_matrix_rk1(tau, 128)
    off = [m[0][1], m[1][0]]
    off_ok = all(x.contains_zero() and x.max_rad() < 1e-20 for x in off)
    diag_ok = m[0][0].overlaps(m[1][1])
    worst = max(float(x.max_rad()) for x in off)
    _record(10, f"duality matrix diagonal at tau = {tau}", off_ok and diag_ok, f"off-diagonal radius {worst:.2e}")
    assert off_ok and diag_ok


def test_criterion_11_escalation_from_16_bits():
    mismatched = []
    for number, compute in COMPUTATIONS.items():
        if compute(16) != _baseline(number):
            mismatched.append(number)
    _record(11, "integer computations of criteria 1-8 from a 16-bit start give identical integers", not mismatched,
            f"mismatched criteria: {mismatched}" if mismatched else "")
    assert not mismatched
