from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from verlinde_cert.certball import (
    Ball,
    CertificationError,
    ComplexBall,
    PossiblyZeroError,
    PrecisionExhausted,
    certify_integer,
    escalate,
    exp_2pi_i_rational,
    exp_i_pi,
    inv,
    pow_int,
    two_sin_pi_rational,
)


def test_add_intervals():
    s = Ball(1.0, 0.1) + Ball(2.0, 0.2)
    assert s.contains(3)
    assert s.rad >= mpmath.mpf("0.3") - mpmath.mpf(2) ** -60


def test_pow_zero_is_exact_one():
    b = pow_int(Ball("1.7", "0.01"), 0)
    assert b.mid == 1 and b.rad == 0


def test_mul_radius_bound():
    p = Ball(2, 0.01, 256) * Ball(3, 0.01, 256)
    assert p.contains(6)
    # |a| rb + |b| ra + ra rb = 0.0501
    assert p.rad <= mpmath.mpf("0.0502")


def test_inv_rejects_zero():
    with pytest.raises(PossiblyZeroError, match="division by possibly-zero ball"):
        inv(Ball(0.5, 0.6))
    with pytest.raises(ZeroDivisionError):
        Ball(1) / Ball(0)


def test_inv_contains_reciprocal_interval():
    b = inv(Ball(3, 0.1, 64))
    for x in (Fraction(29, 10), 3, Fraction(31, 10)):
        assert b.contains(1 / Fraction(x))


def test_rational_conversion_carries_error():
    third = Ball(Fraction(1, 3), 0, 64)
    assert third.contains(Fraction(1, 3))
    assert not third.is_exact()
    assert Ball(Fraction(3, 8)).is_exact()


@pytest.mark.parametrize(
    "m, n, expected",
    [(1, 6, 1), (7, 6, -1), (3, 6, 2), (0, 5, 0), (5, 5, 0), (-1, 6, -1)],
)
def test_two_sin_exact_values(m, n, expected):
    b = two_sin_pi_rational(m, n, 64)
    assert b.is_exact()
    assert b.mid == expected


def test_two_sin_quarter_is_sqrt2():
    b = two_sin_pi_rational(1, 4, 128)
    with mpmath.workprec(400):
        ref = mpmath.sqrt(2)
        assert abs(mpmath.mpf(b.mid) - ref) <= b.rad + mpmath.mpf(2) ** -390
    assert b.rad < mpmath.mpf(2) ** -120


def test_two_sin_invalid_denominator():
    with pytest.raises(ValueError, match="invalid denominator"):
        two_sin_pi_rational(1, 0)
    with pytest.raises(ValueError, match="invalid denominator"):
        exp_2pi_i_rational(1, 0)


@given(st.integers(-500, 500), st.integers(1, 60))
def test_two_sin_matches_high_precision(m, n):
    b = two_sin_pi_rational(m, n, 96)
    with mpmath.workprec(400):
        ref = 2 * mpmath.sin(mpmath.pi * m / n)
        assert abs(b.mid - ref) <= b.rad + mpmath.mpf(2) ** -380


def test_sine_symmetry_overlaps():
    for n in range(2, 51):
        for m in range(1, n):
            a, b = two_sin_pi_rational(m, n, 96), two_sin_pi_rational(n - m, n, 96)
            assert a.overlaps(b)
            assert (a * b).is_positive()


@pytest.mark.parametrize("n", range(2, 51))
def test_sine_product_identity(n):
    prod = Ball(1, 0, 128)
    for p in range(1, n):
        prod = prod * two_sin_pi_rational(p, n, 128)
    assert prod.contains(n)
    assert certify_integer(prod).value == n


def test_exp_2pi_i_examples():
    one = exp_2pi_i_rational(0, 5, 64)
    assert one.re.mid == 1 and one.re.is_exact() and one.im.is_exact() and one.im.mid == 0
    quarter = exp_2pi_i_rational(1, 4, 64)
    assert quarter.contains((0, 1)) and quarter.re.is_exact()
    third = exp_2pi_i_rational(1, 3, 128)
    assert third.re.contains(Fraction(-1, 2))
    with mpmath.workprec(300):
        assert abs(third.im.mid - mpmath.sqrt(3) / 2) <= third.im.rad + mpmath.mpf(2) ** -290


@given(st.integers(-1000, 1000), st.integers(1, 200))
def test_exp_unit_modulus(num, den):
    z = exp_2pi_i_rational(num, den, 80)
    assert z.abs2().contains(1)


def test_exp_i_pi_with_imaginary_argument():
    z = exp_i_pi((Fraction(1, 2), Fraction(1)), 128)
    with mpmath.workprec(300):
        ref = mpmath.exp(mpmath.pi * 1j * mpmath.mpc(0.5, 1))
        assert abs(z.re.mid - ref.real) <= z.re.rad + mpmath.mpf(2) ** -280
        assert abs(z.im.mid - ref.imag) <= z.im.rad + mpmath.mpf(2) ** -280


def test_certify_examples():
    c = certify_integer(Ball("39.9999", "0.001"))
    assert c.value == 40
    assert abs(c.margin - mpmath.mpf("0.4989")) < 1e-9
    assert c.margin > 0
    with pytest.raises(CertificationError, match="increase precision"):
        certify_integer(Ball("2.5", "0.1"))
    with pytest.raises(CertificationError):
        certify_integer(Ball(3, "0.6"))


@given(st.integers(-10**30, 10**30), st.fractions(-Fraction(2, 5), Fraction(2, 5)))
def test_certify_recovers_integer(v, offset):
    rad = (Fraction(1, 2) - abs(offset)) / 2
    c = certify_integer(Ball(v + offset, rad, 200))
    assert c.value == v
    assert abs(c.source.mid_fraction() - c.value) + c.source.rad_fraction() < Fraction(1, 2)


def test_escalate_doubles_until_certified():
    seen = []

    def compute(prec):
        seen.append(prec)
        return certify_integer(Ball(7, Fraction(1, 2) ** (prec // 8)))

    assert escalate(compute, prec=8, max_prec=1024).value == 7
    assert seen == [8, 16]


def test_escalate_cap():
    def never(prec):
        raise CertificationError("certification failed; increase precision")

    with pytest.raises(PrecisionExhausted):
        escalate(never, prec=16, max_prec=64)


def test_complex_arithmetic():
    i = ComplexBall.exact(0, 1)
    assert (i * i).contains((-1, 0))
    z = ComplexBall.exact(3, 4, 64)
    assert (z * z.inv()).contains((1, 0))
    assert z.abs2().contains(25)


# -- containment under random composed expressions ------------------------------------

leaf = st.one_of(
    st.tuples(st.just("q"), st.integers(-50, 50), st.integers(1, 12)),
    st.tuples(st.just("s"), st.integers(-40, 40), st.integers(1, 24)),
)


def _expr(children):
    return st.one_of(
        st.tuples(st.sampled_from(["add", "sub", "mul"]), children, children),
        st.tuples(st.just("inv"), children),
        st.tuples(st.just("pow"), children, st.integers(0, 4)),
    )


expressions = st.recursive(leaf, _expr, max_leaves=12)


def _eval_ball(e, prec):
    tag = e[0]
    if tag == "q":
        return Ball(Fraction(e[1], e[2]), 0, prec)
    if tag == "s":
        return two_sin_pi_rational(e[1], e[2], prec)
    if tag == "inv":
        return inv(_eval_ball(e[1], prec))
    if tag == "pow":
        return pow_int(_eval_ball(e[1], prec), e[2])
    a, b = _eval_ball(e[1], prec), _eval_ball(e[2], prec)
    return {"add": a + b, "sub": a - b, "mul": a * b}[tag]


def _eval_mp(e):
    tag = e[0]
    if tag == "q":
        return mpmath.mpf(e[1]) / e[2]
    if tag == "s":
        return 2 * mpmath.sin(mpmath.pi * mpmath.mpf(e[1]) / e[2])
    if tag == "inv":
        return 1 / _eval_mp(e[1])
    if tag == "pow":
        return _eval_mp(e[1]) ** e[2]
    a, b = _eval_mp(e[1]), _eval_mp(e[2])
    return {"add": a + b, "sub": a - b, "mul": a * b}[tag]


@settings(max_examples=1000)
@given(expressions, st.sampled_from([24, 53, 96]))
def test_containment_random_expressions(e, prec):
    try:
        lo = _eval_ball(e, prec)
        hi = _eval_ball(e, 4 * prec)
    except PossiblyZeroError:
        return
    # two enclosures of one true value must intersect
    assert lo.overlaps(hi)
    with mpmath.workprec(8 * prec):
        try:
            ref = _eval_mp(e)
        except ZeroDivisionError:
            return
        slack = mpmath.mpf(2) ** (-6 * prec) * max(1, abs(ref))
        assert abs(ref - lo.mid) <= lo.rad + slack
        assert abs(ref - hi.mid) <= hi.rad + slack
