import math
from fractions import Fraction

import mpmath
import pytest

from syracuse.critical import (
    critical_bracket,
    critical_csv,
    critical_point,
    critical_table,
    fixed_points,
    mu,
    nu,
    x1_fixed_point,
)
from syracuse.kernel import Ball
from syracuse.maps import f_derivatives, f_ext, fprime_centered, fsecond_centered

PUBLISHED_C = {1: 1.180938, 3: 3.084794, 5: 5.054721, 7: 7.040311, 9: 9.031889, 13: 13.022478}


def mp_fprime(x):
    return 1 - mpmath.cospi(x) / 2 + mpmath.pi * (x / 2 + mpmath.mpf(1) / 4) * mpmath.sinpi(x)


def test_published_critical_points():
    for n, v in PUBLISHED_C.items():
        c = critical_point(n).enclosure
        assert abs(float(c.mid) - v) < 1e-6


def test_critical_points_against_mpmath_oracle():
    mpmath.mp.dps = 110
    for n in (1, 2, 3, 10, 77, 500, -3, -4):
        lo, hi, _ = critical_bracket(n, 128)
        root = mpmath.findroot(mp_fprime, (mpmath.mpf(lo.mid), mpmath.mpf(hi.mid)), solver="anderson")
        assert critical_point(n, 256).enclosure.contains(root)


def test_c2_bracket():
    c2 = critical_point(2).enclosure
    assert 2 - 1 / (2 * math.pi**2) < float(c2.lo) and c2.hi < 2


def test_lemma1_brackets_and_half_unit_windows():
    for cp in critical_table(range(1, 2001)):
        n, c = cp.n, cp.enclosure
        lo, hi, derived = critical_bracket(n, 128)
        assert not derived
        assert c.lo > lo.hi and c.hi < hi.lo
        if n % 2 == 0:
            assert n - 0.5 < c.lo and c.hi < n
        else:
            assert n < c.lo and c.hi < n + 0.5


def test_simple_critical_point():
    for n in (1, 2, 3, 50, -7, -8):
        c = critical_point(n).enclosure
        assert fprime_centered(c).contains_zero()
        assert not fsecond_centered(c).contains_zero()


def test_negative_brackets_are_flagged():
    cp = critical_point(-34)
    assert cp.derived_bracket
    assert -34 < cp.enclosure.lo and cp.enclosure.hi < -33.5
    with pytest.raises(ValueError):
        critical_point(0)


def test_refinement_tightens_radius():
    assert critical_point(5, 512).enclosure.rad < critical_point(5, 128).enclosure.rad
    assert critical_point(5, 512).enclosure.overlaps(critical_point(5, 128).enclosure)


def test_fixed_points():
    assert abs(float(mu(1).value) - 0.277) < 1e-3
    assert abs(float(mu(3).value) - 2.445) < 1e-3
    assert abs(float(nu(1).value) + 1.277) < 1e-3
    assert mu(0).stability == "attractive" and float(mu(0).multiplier.mid) == 0.5
    assert nu(0).stability == "repulsive"
    assert mu(1).stability == "repulsive" and mu(3).stability == "repulsive"
    pts = fixed_points(10)
    positives = [p for p in pts if p.label.startswith("mu")]
    assert [p.label for p in positives] == [f"mu{i}" for i in range(11)]
    for i, p in enumerate(positives[1:], start=1):
        assert i - 1 < p.enclosure.lo and p.enclosure.hi < i
        assert (f_ext(p.enclosure) - p.enclosure).contains(0)
    with pytest.raises(ValueError):
        fixed_points(0.5)


def test_reflection_nu_equals_minus_one_minus_mu():
    for i in range(11):
        assert (nu(i).enclosure - (-1 - mu(i).enclosure)).contains(0)


def test_x1():
    x1 = x1_fixed_point()
    assert abs(float(x1.value) - 1.023686) < 1e-6
    assert (f_ext(f_ext(x1.enclosure)) - x1.enclosure).contains(0)
    assert x1.stability == "repulsive" and x1.multiplier.lo > 1


def test_csv_export():
    text = critical_csv(critical_table([1, -2], 128), digits=10)
    lines = text.splitlines()
    assert lines[0] == "n,c_n,radius_exp2,bits,derived_bracket"
    assert lines[1].startswith("1,1.1809387090,") and lines[1].endswith(",128,0")
    assert lines[2].endswith(",128,1")
