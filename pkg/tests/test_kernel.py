import math
from fractions import Fraction

import gmpy2
import mpmath
import pytest
from gmpy2 import mpfr
from hypothesis import assume, given
from hypothesis import strategies as st

from syracuse.errors import EscalationExhausted, InsufficientPrecision
from syracuse.kernel import (
    Ball,
    PrecisionPolicy,
    agree,
    cos,
    cospi,
    eval_escalating,
    exp,
    log,
    pi_ball,
    sincospi,
    sqrt,
)
from syracuse.maps import f_ext

BITS = 96
mids = st.floats(min_value=-50, max_value=50, allow_nan=False)
rads = st.floats(min_value=0, max_value=0.5)
fractions = st.floats(min_value=0, max_value=1)


def ball(m, r):
    return Ball(mpfr(m, BITS), r)


def to_mp(x):
    """Exact conversion of an mpfr to mpmath."""
    m, e = x.as_mantissa_exp()
    return mpmath.ldexp(mpmath.mpf(int(m)), int(e))


def point(b, t):
    """The point mid + (2t - 1) rad of b, exact (subnormal radii need ~1200 bits)."""
    mpmath.mp.prec = 1200
    return to_mp(b.mid) + (2 * mpmath.mpf(t) - 1) * to_mp(b.rad)


def inside(b, value):
    return to_mp(b.lo) <= value <= to_mp(b.hi)


@given(mids, rads, mids, rads, fractions, fractions)
def test_arithmetic_contains_sampled_images(m1, r1, m2, r2, t1, t2):
    a, b = ball(m1, r1), ball(m2, r2)
    x, y = point(a, t1), point(b, t2)
    assert inside(a + b, x + y)
    assert inside(a - b, x - y)
    assert inside(a * b, x * y)
    if not b.contains_zero():
        assert inside(a / b, x / y)


@given(mids, rads, fractions)
def test_transcendentals_contain_sampled_images(m, r, t):
    a = ball(m, r)
    x = point(a, t)
    assert inside(cos(a), mpmath.cos(x))
    assert inside(cospi(a), mpmath.cospi(x))
    small = ball(m / 10, r)
    assert inside(exp(small), mpmath.exp(point(small, t)))
    if a.positive():
        assert inside(log(a), mpmath.log(x))
        assert inside(sqrt(a), mpmath.sqrt(x))


@given(st.floats(min_value=-1e6, max_value=1e6, allow_nan=False), rads, fractions)
def test_sincospi_large_arguments(m, r, t):
    a = ball(m, r * 1e-3)
    s, c = sincospi(a)
    x = point(a, t)
    assert inside(s, mpmath.sinpi(x))
    assert inside(c, mpmath.cospi(x))


def test_containment_grid_sampling():
    """100 sample points per ball over a fixed set of balls and all operations."""
    balls = [ball(m, r) for m in (-3.7, -0.4, 0.25, 1.5, 9.2) for r in (0, 1e-9, 0.01, 0.3)]
    for a in balls:
        for b in balls:
            for i in range(100):
                t = mpmath.mpf(i) / 99
                x, y = point(a, t), point(b, 1 - t)
                assert inside(a + b, x + y) and inside(a - b, x - y) and inside(a * b, x * y)
                if not b.contains_zero():
                    assert inside(a / b, x / y)
        for i in range(100):
            x = point(a, mpmath.mpf(i) / 99)
            assert inside(cos(a), mpmath.cos(x)) and inside(exp(a), mpmath.exp(x))
            if a.positive():
                assert inside(log(a), mpmath.log(x))


@given(st.floats(min_value=0.1, max_value=30), st.integers(min_value=0, max_value=5))
def test_refinement_does_not_widen(x, k):
    """Doubling the precision never increases the radius of the same expression."""
    def expr(bits):
        b = Ball.exact(Fraction(x).limit_denominator(10**6), bits)
        return log(exp(cos(b) + 2) * b) + f_ext(b)

    radii = [expr(128 * 2**j).rad for j in range(k + 1)]
    assert all(r2 <= r1 for r1, r2 in zip(radii, radii[1:]))


def test_determinism_bit_identical():
    a = Ball.exact(Fraction(22, 7), 200)
    r1, r2 = f_ext(a) * cos(a), f_ext(a) * cos(a)
    assert r1.mid == r2.mid and r1.rad == r2.rad


def test_integers_and_dyadics_are_exact():
    assert Ball.exact(10**40, 64).is_exact()
    assert Ball.exact(Fraction(3, 8), 64).is_exact()
    assert not Ball.exact(Fraction(1, 3), 64).is_exact()
    assert Ball.exact(Fraction(1, 3), 64).contains(Fraction(1, 3))


def test_python_operators_keep_working_precision():
    a = Ball.exact(Fraction(1, 3), 400)
    assert (-a).mid.precision == 400
    assert abs(a).mid.precision == 400
    assert (a * 2).mid.precision == 400
    assert float(((a * 3) - 1).abs_upper()) < 2.0**-390


def test_pi_ball_matches_mpmath():
    mpmath.mp.dps = 60
    assert inside(pi_ball(200), +mpmath.pi)


def test_certified_comparisons():
    a, b = Ball.exact(1, 64), Ball(mpfr(2, 64), 0.5)
    assert a < b and b > a
    assert not (Ball(mpfr(1, 64), 2) < b)
    assert Ball(mpfr(1, 64), 2).contains_zero()


def test_log_and_sqrt_domain():
    with pytest.raises(ValueError):
        log(Ball(mpfr(0.1, 64), 0.5))
    with pytest.raises(ValueError):
        sqrt(Ball(mpfr(-1, 64)))


# -- precision policy -----------------------------------------------------------


def test_policy_defaults_and_validation():
    p = PrecisionPolicy()
    assert (p.start_bits, p.max_bits, p.escalation, p.agreement_digits) == (128, 32768, 2, 20)
    assert p.max_bits > 4983
    assert list(PrecisionPolicy(128, 1024).levels()) == [128, 256, 512, 1024]
    for bad in (dict(start_bits=32), dict(start_bits=512, max_bits=256), dict(escalation=1)):
        with pytest.raises(ValueError):
            PrecisionPolicy(**bad)
    assert p.doubled().start_bits == 256


def test_eval_escalating_pi():
    value, bits = eval_escalating(lambda b: pi_ball(b))
    assert bits == 128
    assert str(value.mid).startswith("3.14159265358979323846")


def test_eval_escalating_f2_exact():
    value, bits = eval_escalating(lambda b: f_ext(Ball.exact(2, b)))
    assert value.contains(1) and value.rad < mpfr(2) ** -100


def test_eval_escalating_skips_insufficient_levels():
    def comp(bits):
        if bits < 512:
            raise InsufficientPrecision("need more")
        return Ball.exact(Fraction(1, 3), bits)

    _, bits = eval_escalating(comp)
    assert bits == 512


def test_eval_escalating_exhausted():
    with pytest.raises(EscalationExhausted) as info:
        eval_escalating(lambda b: Ball.exact(b, 64), PrecisionPolicy(128, 512))
    assert info.value.bits == 512


def test_agree_labels_and_numbers():
    assert agree("A1", "A1", 20) and not agree("A1", "A2", 20)
    assert agree(mpfr("1.00000000000000000000001", 200), mpfr(1, 200), 20)
    assert not agree(1.0, 1.001, 20)
