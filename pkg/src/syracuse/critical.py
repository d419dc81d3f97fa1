"""Certified critical points c_n of f and its fixed points.

Every root is returned as a :class:`~syracuse.kernel.Ball` whose end
points carry opposite certified signs of the defining function, so the
ball provably contains a root.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from gmpy2 import mpfr

from .errors import BracketFailure
from .kernel import GUARD_BITS, Ball, BigReal, _eps, _RU, context, pi_ball
from .maps import _derivs, f_ext, fprime_centered, fsecond_centered

BallFn = Callable[[Ball], Ball]


def _sign(b: Ball) -> int:
    if b.positive():
        return 1
    if b.negative():
        return -1
    return 0


def certified_root(
    func: BallFn,
    dfunc: BallFn,
    lo: BigReal,
    hi: BigReal,
    bits: int,
    bisections: int = 12,
) -> Ball:
    """Enclose the root of ``func`` in ``[lo, hi]``.

    The end points must carry opposite certified signs.  A few bisection
    steps are followed by Newton iteration at ``bits + GUARD_BITS``; the
    final ball is certified by re-checking the sign change at its ends.
    """
    work = bits + GUARD_BITS
    ctx = context(work)
    lo, hi = ctx.plus(lo), ctx.plus(hi)
    s_lo = _sign(func(Ball(lo)))
    s_hi = _sign(func(Ball(hi)))
    if s_lo == 0 or s_hi == 0 or s_lo == s_hi:
        raise BracketFailure(f"no certified sign change on [{lo:.12g}, {hi:.12g}]")
    for _ in range(bisections):
        m = ctx.div_2exp(ctx.add(lo, hi), 1)
        v = func(Ball(m)).mid
        if v == 0:
            lo = hi = m
            break
        if (v > 0) == (s_lo > 0):
            lo = m
        else:
            hi = m
    x = ctx.div_2exp(ctx.add(lo, hi), 1)
    tol = _RU.mul(_eps(bits), _RU.add(_RU.abs(x), 1))
    for _ in range(200):
        fx = func(Ball(x)).mid
        dx = dfunc(Ball(x)).mid
        if dx == 0:
            break
        step = ctx.div(fx, dx)
        x_new = ctx.sub(x, step)
        if not lo <= x_new <= hi:
            x_new = ctx.div_2exp(ctx.add(lo, hi), 1)
        v = func(Ball(x_new)).mid
        if v != 0:
            if (v > 0) == (s_lo > 0):
                lo = x_new if x_new > lo else lo
            else:
                hi = x_new if x_new < hi else hi
        x = x_new
        if ctx.abs(step) <= tol:
            break
    out = context(bits).plus(x)
    delta = _RU.mul(_eps(bits - GUARD_BITS), _RU.add(_RU.abs(out), 1))
    for _ in range(40):
        a = _down_sub(out, delta, bits)
        b = _up_add(out, delta, bits)
        if _sign(func(Ball(a))) == s_lo and _sign(func(Ball(b))) == s_hi:
            return Ball.from_interval(a, b, bits)
        delta = _RU.mul_2exp(delta, 4)
    raise BracketFailure(f"could not certify a root near {out:.20g} at {bits} bits")


def _down_sub(x: BigReal, d: BigReal, bits: int) -> BigReal:
    return context(bits).sub(x, d)


def _up_add(x: BigReal, d: BigReal, bits: int) -> BigReal:
    return context(bits).add(x, d)


# -- critical points -----------------------------------------------------------


@dataclass(frozen=True)
class CriticalPoint:
    """Certified enclosure of the critical point of f adjacent to ``n``."""

    n: int
    enclosure: Ball
    bits: int
    derived_bracket: bool = False

    @property
    def value(self) -> BigReal:
        return self.enclosure.mid


def _f1(x: Ball) -> Ball:
    return _derivs(x, 1)


def _f2(x: Ball) -> Ball:
    return _derivs(x, 2)


def critical_bracket(n: int, bits: int) -> tuple[Ball, Ball, bool]:
    """Bracket for c_n; the flag marks brackets not covered by the bounds for n > 0.

    For n > 0 the bracket is n - 1/(pi^2 n) < c_n < n (n even) or
    n < c_n < n + 3/(pi^2 n) (n odd).  For n < 0 the half-unit brackets
    (n, n + 1/2) (even) and (n - 1/2, n) (odd) are used.
    """
    if n == 0:
        raise ValueError("critical points are indexed by nonzero integers")
    pi = pi_ball(bits)
    if n > 0:
        if n % 2 == 0:
            return n - 1 / (pi * pi * n), Ball.exact(n, bits), False
        return Ball.exact(n, bits), n + 3 / (pi * pi * n), False
    half = Fraction(1, 2)
    if n % 2 == 0:
        return Ball.exact(n, bits), Ball.exact(n + half, bits), True
    return Ball.exact(n - half, bits), Ball.exact(n, bits), True


def critical_point(n: int, bits: int = 128) -> CriticalPoint:
    """Certified critical point c_n of f for a nonzero integer ``n``."""
    left, right, derived = critical_bracket(n, bits)
    enclosure = certified_root(_f1, _f2, left.hi, right.lo, bits)
    return CriticalPoint(n, enclosure, bits, derived)


def critical_table(indices: Iterable[int], bits: int = 128) -> list[CriticalPoint]:
    return [critical_point(n, bits) for n in indices]


def critical_csv(points: Iterable[CriticalPoint], digits: int = 30) -> str:
    """CSV rows ``n, c_n, radius exponent, bits`` (midpoint to ``digits`` digits)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "c_n", "radius_exp2", "bits", "derived_bracket"])
    for cp in points:
        rad = cp.enclosure.rad
        exp2 = int(rad.as_mantissa_exp()[1]) + rad.as_mantissa_exp()[0].bit_length() if rad else None
        writer.writerow([cp.n, f"{cp.value:.{digits}f}", exp2, cp.bits, int(cp.derived_bracket)])
    return buf.getvalue()


# -- fixed points ----------------------------------------------------------------


@dataclass(frozen=True)
class FixedPoint:
    """A certified fixed point of f (period 1) or of f^2 (period 2)."""

    label: str
    enclosure: Ball
    multiplier: Ball
    period: int = 1
    bits: int = 128
    notes: dict = field(default_factory=dict, compare=False)

    @property
    def stability(self) -> str:
        m = abs(self.multiplier)
        if m.hi < 1:
            return "attractive"
        if m.lo > 1:
            return "repulsive"
        return "undecided"

    @property
    def value(self) -> BigReal:
        return self.enclosure.mid


def _fix_g(x: Ball) -> Ball:
    return f_ext(x) - x


def _fix_dg(x: Ball) -> Ball:
    return _derivs(x, 1) - 1


def mu_bracket(i: int) -> tuple[Fraction, Fraction]:
    """Bracket of the i-th positive fixed point mu_i (i >= 1), inside (i-1, i)."""
    if i < 1:
        raise ValueError("mu_0 = 0 needs no bracket")
    if i == 1:
        return Fraction(1, 4), Fraction(1, 2)
    if i % 2 == 0:
        return Fraction(2 * i - 1, 2), Fraction(i)
    return Fraction(i - 1), Fraction(2 * i - 1, 2)


def _fixed(label: str, lo: Fraction, hi: Fraction, bits: int) -> FixedPoint:
    a = Ball.exact(lo, bits)
    b = Ball.exact(hi, bits)
    enc = certified_root(_fix_g, _fix_dg, a.mid, b.mid, bits)
    return FixedPoint(label, enc, fprime_centered(enc), 1, bits)


def mu(i: int, bits: int = 128) -> FixedPoint:
    """Positive fixed point mu_i; mu_0 = 0."""
    if i == 0:
        z = Ball.exact(0, bits)
        return FixedPoint("mu0", z, fprime_centered(z), 1, bits)
    lo, hi = mu_bracket(i)
    return _fixed(f"mu{i}", lo, hi, bits)


def nu(i: int, bits: int = 128) -> FixedPoint:
    """Negative fixed point nu_i, computed directly in the reflected bracket.

    The functional equation f(x) - f(-1-x) = 2x + 1 predicts
    nu_i = -1 - mu_i; callers can compare against :func:`mu`.
    """
    if i == 0:
        z = Ball.exact(-1, bits)
        return FixedPoint("nu0", z, fprime_centered(z), 1, bits)
    lo, hi = mu_bracket(i)
    return _fixed(f"nu{i}", -1 - hi, -1 - lo, bits)


def fixed_points(x_max: float, bits: int = 128) -> list[FixedPoint]:
    """All mu_i in [0, x_max] and the matching nu_i = -1 - mu_i."""
    if x_max < 1:
        raise ValueError("x_max must be at least 1")
    out = [mu(0, bits)]
    i = 1
    while mu_bracket(i)[0] <= x_max:
        p = mu(i, bits)
        if p.enclosure.hi > x_max:
            break
        out.append(p)
        i += 1
    count = len(out)
    out.extend(nu(j, bits) for j in range(count))
    return out


def _f2_minus_x(x: Ball) -> Ball:
    return f_ext(f_ext(x)) - x


def _df2_minus_1(x: Ball) -> Ball:
    return _derivs(f_ext(x), 1) * _derivs(x, 1) - 1


def x1_fixed_point(bits: int = 128) -> FixedPoint:
    """The repelling fixed point of f^2 in (1, c_1) bounding the basin of {1, 2}."""
    c1 = critical_point(1, bits).enclosure
    lo = Ball.exact(Fraction(129, 128), bits)
    enc = certified_root(_f2_minus_x, _df2_minus_1, lo.mid, c1.lo, bits)
    mult = fprime_centered(f_ext(enc)) * fprime_centered(enc)
    return FixedPoint("x1", enc, mult, 2, bits)
