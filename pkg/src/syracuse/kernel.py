"""Arbitrary-precision reals, midpoint-radius balls and precision escalation.

Big reals are plain :class:`gmpy2.mpfr` values; their precision is the
``precision`` attribute of the number.  A :class:`Ball` pairs an ``mpfr``
midpoint with a low-precision radius that is always rounded upward, so the
true value of every operation lies in the returned ball.

All arithmetic goes through explicit :func:`gmpy2.context` objects.  The
global gmpy2 context is never consulted, which keeps results independent
of whatever precision the caller happens to have set.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Iterator

import gmpy2
from gmpy2 import mpfr, mpq, mpz

from .errors import EscalationExhausted, InsufficientPrecision

BigReal = type(mpfr(0))

MIN_BITS = 64
GUARD_BITS = 8
RAD_BITS = 30

_RU = gmpy2.context(precision=RAD_BITS, round=gmpy2.RoundUp)
_RD = gmpy2.context(precision=RAD_BITS, round=gmpy2.RoundDown)
_ZERO = mpfr(0, RAD_BITS)
_PI_UP = _RU.const_pi()


@functools.lru_cache(maxsize=None)
def context(bits: int) -> gmpy2.context:
    """Round-to-nearest context at ``bits`` of precision."""
    return gmpy2.context(precision=bits)


@functools.lru_cache(maxsize=None)
def _down(bits: int) -> gmpy2.context:
    return gmpy2.context(precision=bits, round=gmpy2.RoundDown)


@functools.lru_cache(maxsize=None)
def _up(bits: int) -> gmpy2.context:
    return gmpy2.context(precision=bits, round=gmpy2.RoundUp)


@functools.lru_cache(maxsize=None)
def _eps(bits: int) -> BigReal:
    return _RU.mul_2exp(mpfr(1, 2), -bits)


def big(value: Any, bits: int) -> BigReal:
    """Round ``value`` (int, float, str, Fraction, mpq or mpfr) to ``bits``."""
    ctx = context(bits)
    if isinstance(value, (Fraction, type(mpq(0)))):
        return ctx.div(mpz(value.numerator), mpz(value.denominator))
    if isinstance(value, str):
        return mpfr(value, bits)
    return ctx.plus(value)


def _err(x: BigReal, bits: int) -> BigReal:
    """Upper bound for the rounding error of a round-to-nearest result ``x``."""
    return _RU.mul(_RU.abs(x), _eps(bits))


def pi_ball(bits: int) -> "Ball":
    """Enclosure of pi at ``bits``; cached per precision level."""
    return _pi_ball(bits)


@functools.lru_cache(maxsize=64)
def _pi_ball(bits: int) -> "Ball":
    mid = context(bits).const_pi()
    return Ball(mid, _err(mid, bits))


def _rad_up(value: Any) -> BigReal:
    """Radius-precision mpfr not below ``value``."""
    if isinstance(value, float):
        return _RU.plus(mpfr(value, 53))
    q = mpq(value)
    return _RU.div(mpz(q.numerator), mpz(q.denominator))


class Ball:
    """Closed interval ``[mid - rad, mid + rad]`` with outward-rounded arithmetic.

    Instances are immutable.  Binary operations accept Python ints,
    :class:`fractions.Fraction`, floats and mpfr values on either side; the
    working precision is the larger of the two midpoint precisions.
    """

    __slots__ = ("mid", "rad")

    def __init__(self, mid: BigReal, rad: Any = _ZERO):
        if not isinstance(mid, BigReal):
            raise TypeError("Ball midpoint must be an mpfr; use Ball.exact")
        if not isinstance(rad, BigReal):
            rad = _rad_up(rad)
        if rad < 0 or not gmpy2.is_finite(rad):
            raise ValueError(f"invalid ball radius {rad}")
        object.__setattr__(self, "mid", mid)
        object.__setattr__(self, "rad", rad)

    def __setattr__(self, name, value):
        raise AttributeError("Ball is immutable")

    # -- construction -----------------------------------------------------

    @classmethod
    def exact(cls, value: Any, bits: int) -> "Ball":
        """Enclose ``value``; integers and dyadic rationals stay exact."""
        if isinstance(value, Ball):
            return value
        if isinstance(value, (int, type(mpz(0)))):
            need = max(bits, int(mpz(value).bit_length()) + 1)
            return cls(mpfr(value, need))
        if isinstance(value, float):
            return cls(mpfr(value, max(bits, 53)))
        if isinstance(value, BigReal):
            return cls(value)
        if isinstance(value, (Fraction, type(mpq(0)))):
            num, den = int(value.numerator), int(value.denominator)
            if den & (den - 1) == 0:  # dyadic: exact at sufficient precision
                need = max(bits, num.bit_length() + 1)
                return cls(context(need).div_2exp(mpfr(num, need), den.bit_length() - 1))
            ctx = context(bits)
            mid = ctx.div(mpz(value.numerator), mpz(value.denominator))
            return cls(mid, _err(mid, bits))
        if isinstance(value, str):
            mid = mpfr(value, bits)
            return cls(mid, _err(mid, bits))
        raise TypeError(f"cannot build a Ball from {type(value).__name__}")

    @classmethod
    def from_interval(cls, lo: Any, hi: Any, bits: int) -> "Ball":
        """Smallest-ish ball containing ``[lo, hi]`` (endpoints may be Balls)."""
        lo_b = cls.exact(lo, bits)
        hi_b = cls.exact(hi, bits)
        a, b = lo_b.lo, hi_b.hi
        if a > b:
            raise ValueError("empty interval")
        ctx = context(bits)
        mid = ctx.div_2exp(ctx.add(a, b), 1)
        r1, r2 = _RU.sub(b, mid), _RU.sub(mid, a)
        return cls(mid, r1 if r1 >= r2 else r2)

    # -- inspection -------------------------------------------------------

    @property
    def prec(self) -> int:
        return self.mid.precision

    @property
    def lo(self) -> BigReal:
        return _down(self.prec).sub(self.mid, self.rad)

    @property
    def hi(self) -> BigReal:
        return _up(self.prec).add(self.mid, self.rad)

    def is_exact(self) -> bool:
        return self.rad == 0

    def contains(self, x: Any) -> bool:
        if isinstance(x, Ball):
            return self.lo <= x.lo and x.hi <= self.hi
        if isinstance(x, (Fraction, type(mpq(0)))):
            x = mpq(x)
        return self.lo <= x <= self.hi

    def within(self, other: "Ball") -> bool:
        """True if this ball is a subset of ``other``."""
        return other.contains(self)

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def positive(self) -> bool:
        return self.lo > 0

    def negative(self) -> bool:
        return self.hi < 0

    def overlaps(self, other: "Ball") -> bool:
        return not (self.hi < other.lo or other.hi < self.lo)

    def abs_upper(self) -> BigReal:
        return _RU.add(_RU.abs(self.mid), self.rad)

    def abs_lower(self) -> BigReal:
        v = _RD.sub(_RD.abs(self.mid), self.rad)
        return v if v > 0 else _ZERO

    def rel_rad(self) -> BigReal:
        if self.mid == 0:
            return mpfr("inf") if self.rad else _ZERO
        return _RU.div(self.rad, _RD.abs(self.mid))

    def with_prec(self, bits: int) -> "Ball":
        """Re-round the midpoint to ``bits`` (radius widened as needed)."""
        if bits == self.prec:
            return self
        mid = context(bits).plus(self.mid)
        return Ball(mid, _RU.add(self.rad, _RU.abs(_RU.sub(mid, self.mid)) if mid != self.mid else _ZERO))

    def union(self, other: "Ball") -> "Ball":
        bits = max(self.prec, other.prec)
        a = self.lo if self.lo <= other.lo else other.lo
        b = self.hi if self.hi >= other.hi else other.hi
        return Ball.from_interval(a, b, bits)

    def __float__(self) -> float:
        return float(self.mid)

    def __repr__(self) -> str:
        return f"Ball({self.mid:.25g} +/- {float(self.rad):.3g}, prec={self.prec})"

    def __str__(self) -> str:
        return f"[{self.mid:.20g} +/- {float(self.rad):.3g}]"

    def __eq__(self, other):
        if not isinstance(other, Ball):
            return NotImplemented
        return self.mid == other.mid and self.rad == other.rad

    def __hash__(self):
        return hash((self.mid, self.rad))

    # -- arithmetic -------------------------------------------------------

    def _co(self, other: Any) -> "Ball":
        return other if isinstance(other, Ball) else Ball.exact(other, self.prec)

    def __neg__(self) -> "Ball":
        return Ball(context(self.prec).minus(self.mid), self.rad)

    def __pos__(self) -> "Ball":
        return self

    def __abs__(self) -> "Ball":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        hi = self.abs_upper()
        half = _RU.div_2exp(hi, 1)
        return Ball(context(self.prec).plus(half), half)

    def __add__(self, other: Any) -> "Ball":
        o = self._co(other)
        bits = max(self.prec, o.prec)
        mid = context(bits).add(self.mid, o.mid)
        rad = _RU.add(_RU.add(self.rad, o.rad), _err(mid, bits))
        return Ball(mid, rad)

    __radd__ = __add__

    def __sub__(self, other: Any) -> "Ball":
        o = self._co(other)
        bits = max(self.prec, o.prec)
        mid = context(bits).sub(self.mid, o.mid)
        rad = _RU.add(_RU.add(self.rad, o.rad), _err(mid, bits))
        return Ball(mid, rad)

    def __rsub__(self, other: Any) -> "Ball":
        return self._co(other) - self

    def __mul__(self, other: Any) -> "Ball":
        o = self._co(other)
        bits = max(self.prec, o.prec)
        mid = context(bits).mul(self.mid, o.mid)
        rad = _err(mid, bits)
        if self.rad or o.rad:
            rad = _RU.add(rad, _RU.mul(_RU.abs(self.mid), o.rad))
            rad = _RU.add(rad, _RU.mul(_RU.abs(o.mid), self.rad))
            rad = _RU.add(rad, _RU.mul(self.rad, o.rad))
        return Ball(mid, rad)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "Ball":
        o = self._co(other)
        bits = max(self.prec, o.prec)
        den = _RD.sub(_RD.abs(o.mid), o.rad)
        if den <= 0:
            raise ZeroDivisionError("divisor ball contains zero")
        mid = context(bits).div(self.mid, o.mid)
        rad = _err(mid, bits)
        if self.rad or o.rad:
            num = _RU.add(_RU.mul(_RU.abs(self.mid), o.rad), _RU.mul(_RU.abs(o.mid), self.rad))
            rad = _RU.add(rad, _RU.div(num, _RD.mul(_RD.abs(o.mid), den)))
        return Ball(mid, rad)

    def __rtruediv__(self, other: Any) -> "Ball":
        return self._co(other) / self

    def __pow__(self, k: int) -> "Ball":
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers are supported")
        result = Ball.exact(1, self.prec)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def mul_2exp(self, k: int) -> "Ball":
        """Exact scaling by ``2**k``."""
        ctx = context(self.prec)
        return Ball(ctx.mul_2exp(self.mid, k), _RU.mul_2exp(self.rad, k))

    # ordering is certified: a < b only when the balls are disjoint
    def __lt__(self, other: Any) -> bool:
        o = self._co(other)
        return self.hi < o.lo

    def __gt__(self, other: Any) -> bool:
        o = self._co(other)
        return self.lo > o.hi


# -- elementary functions ---------------------------------------------------


def _reduce_pi(m: BigReal):
    """Reduce ``m`` for sin/cos(pi m).

    Returns ``(t, cos_sign, sin_sign)`` with ``t`` in ``[0, 1/2]`` such that
    ``cos(pi m) = cos_sign * cos(pi t)`` and ``sin(pi m) = sin_sign * sin(pi t)``.
    Every step is exact in the precision of ``m``.
    """
    bits = m.precision
    ctx = context(bits)
    r = ctx.fmod(m, 2)
    sin_sign = 1
    if r < 0:
        r = ctx.minus(r)
        sin_sign = -1
    cos_sign = 1
    if r > 1:
        r = ctx.sub(2, r)
        sin_sign = -sin_sign
    if r > 0.5:
        r = ctx.sub(1, r)
        cos_sign = -1
    return r, cos_sign, sin_sign


def sincospi_point(m: BigReal, bits: int | None = None):
    """``(sin(pi m), cos(pi m), err)`` with a common absolute error bound.

    The argument is reduced before multiplication by pi, so the absolute
    accuracy does not degrade for large ``m``.
    """
    bits = bits or m.precision
    t, cs, ss = _reduce_pi(m)
    if t == 0:
        return mpfr(0, bits), mpfr(cs, bits), _ZERO
    if t == 0.5:
        return mpfr(ss, bits), mpfr(0, bits), _ZERO
    ctx = context(bits + GUARD_BITS)
    theta = ctx.mul(ctx.const_pi(), t)
    s, c = ctx.sin_cos(theta)
    out = context(bits)
    s, c = out.plus(s), out.plus(c)
    if ss < 0:
        s = out.minus(s)
    if cs < 0:
        c = out.minus(c)
    return s, c, _eps(bits - 2)


def sincospi(x: Ball):
    """Enclosures of ``(sin(pi x), cos(pi x))``."""
    s, c, e = sincospi_point(x.mid)
    rad = _RU.add(e, _RU.mul(_PI_UP, x.rad)) if x.rad else e
    if rad >= 2:
        one = mpfr(0, x.prec)
        return Ball(one, 1), Ball(one, 1)
    return Ball(s, rad), Ball(c, rad)


def cospi(x: Ball) -> Ball:
    return sincospi(x)[1]


def sinpi(x: Ball) -> Ball:
    return sincospi(x)[0]


def cos(x: Ball) -> Ball:
    bits = x.prec
    mid = context(bits).cos(x.mid)
    rad = _RU.add(_RU.add(_err(mid, bits), _eps(bits)), x.rad)
    return Ball(mid, rad)


def sin(x: Ball) -> Ball:
    bits = x.prec
    mid = context(bits).sin(x.mid)
    rad = _RU.add(_RU.add(_err(mid, bits), _eps(bits)), x.rad)
    return Ball(mid, rad)


def exp(x: Ball) -> Ball:
    bits = x.prec
    mid = context(bits).exp(x.mid)
    rad = _err(mid, bits)
    if x.rad:
        top = _RU.add(_RU.abs(mid), rad)
        rad = _RU.add(rad, _RU.mul(top, _RU.expm1(x.rad)))
    return Ball(mid, rad)


def log(x: Ball) -> Ball:
    if not x.positive():
        raise ValueError("log of a ball that is not strictly positive")
    bits = x.prec
    mid = context(bits).log(x.mid)
    rad = _RU.add(_err(mid, bits), _eps(bits))
    if x.rad:
        u = _RU.div(x.rad, _RD.plus(x.mid))
        rad = _RU.add(rad, _RU.minus(_RD.log1p(_RD.minus(u))))
    return Ball(mid, rad)


def sqrt(x: Ball) -> Ball:
    if x.lo < 0:
        raise ValueError("sqrt of a ball with negative part")
    bits = x.prec
    mid = context(bits).sqrt(x.mid)
    rad = _err(mid, bits)
    if x.rad:
        lo = x.lo
        if lo > 0:
            rad = _RU.add(rad, _RU.div(x.rad, _RD.sqrt(lo)))
        else:
            rad = _RU.add(rad, _RU.sqrt(_RU.mul(x.rad, 2)))
    return Ball(mid, rad)


# -- precision policy -------------------------------------------------------


@dataclass(frozen=True)
class PrecisionPolicy:
    """Schedule of working precisions used by adaptive computations.

    The default ceiling of 32768 bits (about 9860 decimal digits) is well
    above the roughly 5000 bits some critical orbits need.
    """

    start_bits: int = 128
    max_bits: int = 32768
    escalation: float = 2
    agreement_digits: int = 20

    def __post_init__(self):
        if self.start_bits < MIN_BITS:
            raise ValueError(f"start_bits must be at least {MIN_BITS}")
        if self.start_bits > self.max_bits:
            raise ValueError("start_bits exceeds max_bits")
        if self.escalation <= 1:
            raise ValueError("escalation factor must exceed 1")
        if self.agreement_digits < 1:
            raise ValueError("agreement_digits must be positive")

    def levels(self) -> Iterator[int]:
        bits = self.start_bits
        while bits <= self.max_bits:
            yield bits
            nxt = int(bits * self.escalation)
            bits = nxt if nxt > bits else bits + 1

    def doubled(self) -> "PrecisionPolicy":
        return PrecisionPolicy(
            start_bits=min(2 * self.start_bits, self.max_bits),
            max_bits=self.max_bits,
            escalation=self.escalation,
            agreement_digits=self.agreement_digits,
        )


DEFAULT_POLICY = PrecisionPolicy()


def _as_mpfr(value: Any, bits: int) -> BigReal:
    if isinstance(value, Ball):
        return value.mid
    return big(value, bits)


def agree(a: Any, b: Any, digits: int) -> bool:
    """Leading-decimal-digit agreement of two scalar results.

    Non-numeric results (labels, tuples of labels) agree when equal.
    """
    numeric = (Ball, BigReal, int, float, Fraction, type(mpz(0)), type(mpq(0)))
    if not isinstance(a, numeric) or not isinstance(b, numeric):
        return a == b
    bits = int(digits * 3.33) + 64
    x, y = _as_mpfr(a, bits), _as_mpfr(b, bits)
    ctx = context(bits)
    diff = ctx.abs(ctx.sub(x, y))
    if diff == 0:
        return True
    scale = ctx.abs(y) if ctx.abs(y) > ctx.abs(x) else ctx.abs(x)
    return diff <= ctx.mul(scale, ctx.exp10(-digits))


def eval_escalating(
    computation: Callable[[int], Any],
    policy: PrecisionPolicy = DEFAULT_POLICY,
):
    """Evaluate ``computation(bits)`` at increasing precision until stable.

    Returns ``(value, bits)`` where ``value`` is the result at the first
    level that agrees with the next level to ``policy.agreement_digits``
    leading digits.  A computation may raise :class:`InsufficientPrecision`
    to request the next level directly.
    """
    previous = None
    previous_bits = None
    for bits in policy.levels():
        try:
            value = computation(bits)
        except InsufficientPrecision:
            previous = previous_bits = None
            continue
        if previous_bits is not None and agree(previous, value, policy.agreement_digits):
            return previous, previous_bits
        previous, previous_bits = value, bits
    raise EscalationExhausted(
        f"no agreement to {policy.agreement_digits} digits up to {policy.max_bits} bits",
        bits=policy.max_bits,
        last=previous,
    )
