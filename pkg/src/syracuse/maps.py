"""The integer maps T and U and the real-analytic extension

    f(x) = x + 1/4 - (x/2 + 1/4) cos(pi x)

together with its first three derivatives, its Schwarzian derivative, the
sinusoidal asymptote g(x) = 1 - cos(pi x)/2 and the periodic correction h
with f(x) = g(x) (x + h(x)).

Real-valued functions accept a :class:`~syracuse.kernel.Ball` (returned
enclosure is rigorous), an ``mpfr`` (returns the midpoint at the same
precision), a Python float (returns a float) or an exact int/Fraction
(evaluated at :data:`DEFAULT_BITS`, returned as a Ball).  ``f_ext`` and the
first derivative return exact values for integer arguments.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import gmpy2

from .errors import AmbiguousFloor, DerivativeVanishes
from .kernel import (
    _RU,
    Ball,
    BigReal,
    context,
    pi_ball,
    sincospi,
    sincospi_point,
)

DEFAULT_BITS = 128


# -- integer maps ------------------------------------------------------------


def t_map(n: int) -> int:
    """One step of the 3x+1 map: (3n+1)/2 for odd n, n/2 for even n."""
    return (3 * n + 1) // 2 if n & 1 else n // 2


def u_map(n: int) -> int:
    """One step of the 3x-1 map: (3n-1)/2 for odd n, n/2 for even n."""
    return (3 * n - 1) // 2 if n & 1 else n // 2


# -- argument handling ---------------------------------------------------------


def _to_ball(x: Any) -> tuple[Ball, str]:
    if isinstance(x, Ball):
        return x, "ball"
    if isinstance(x, BigReal):
        return Ball(x), "mpfr"
    if isinstance(x, float):
        return Ball.exact(x, DEFAULT_BITS), "float"
    return Ball.exact(x, DEFAULT_BITS), "ball"


def _out(b: Ball, kind: str):
    if kind == "mpfr":
        return b.mid
    if kind == "float":
        return float(b.mid)
    return b


def _is_int(x: Any) -> bool:
    return isinstance(x, int) and not isinstance(x, bool) or isinstance(x, type(gmpy2.mpz(0)))


# -- the extension -------------------------------------------------------------


def _f_point(m: BigReal) -> tuple[Ball, BigReal, BigReal, BigReal]:
    """f at an exact point, plus sin/cos(pi m) and their common error."""
    s, c, e = sincospi_point(m)
    x = Ball(m)
    q = x.mul_2exp(-1) + Fraction(1, 4)
    fm = (x + Fraction(1, 4)) - q * Ball(c, e)
    return fm, s, c, e


def f_ext(x: Any):
    """The real extension f; agrees with T on positive integers.

    For a ball argument the enclosure uses the mean-value form
    f(X) in f(m) + f'(X)[-r, r], which stays tight along long orbits.
    """
    if _is_int(x):
        n = int(x)
        return (3 * n + 1) // 2 if n & 1 else n // 2
    b, kind = _to_ball(x)
    if not b.rad and gmpy2.is_integer(b.mid):
        # integers map exactly, so integer orbits keep decidable residues
        n = int(b.mid)
        m = (3 * n + 1) // 2 if n & 1 else n // 2
        return _out(Ball.exact(m, b.prec), kind)
    fm, s, c, e = _f_point(b.mid)
    if not b.rad:
        return _out(fm, kind)
    r = b.rad
    spread = _RU.add(e, _RU.mul(_RU.const_pi(), r))
    d1 = _fprime_from(b, Ball(s, spread), Ball(c, spread))
    rad = _RU.add(fm.rad, _RU.mul(d1.abs_upper(), r))
    return _out(Ball(fm.mid, rad), kind)


def _fprime_from(x: Ball, s: Ball, c: Ball) -> Ball:
    q = x.mul_2exp(-1) + Fraction(1, 4)
    pi = pi_ball(x.prec)
    return 1 - c.mul_2exp(-1) + pi * q * s


def _derivs(x: Ball, order: int) -> Ball:
    s, c = sincospi(x)
    if order == 1:
        return _fprime_from(x, s, c)
    q = x.mul_2exp(-1) + Fraction(1, 4)
    pi = pi_ball(x.prec)
    if order == 2:
        return pi * s + pi * pi * q * c
    if order == 3:
        pi2 = pi * pi
        return pi2 * Fraction(3, 2) * c - pi2 * pi * q * s
    if order == 4:
        pi2 = pi * pi
        return pi2 * pi * (-2) * s - pi2 * pi2 * q * c
    raise ValueError("derivative order must be 1, 2, 3 (or 4 for internal use)")


def f_derivatives(x: Any, order: int):
    """Closed-form derivative of f of the requested order (1, 2 or 3).

    Integer arguments give an exact :class:`~fractions.Fraction` for
    order 1, since f'(n) = 1 - (-1)^n / 2.
    """
    if order not in (1, 2, 3):
        raise ValueError("order must be 1, 2 or 3")
    if order == 1 and _is_int(x):
        return Fraction(3, 2) if int(x) & 1 else Fraction(1, 2)
    b, kind = _to_ball(x)
    return _out(_derivs(b, order), kind)


def fprime(x: Any):
    return f_derivatives(x, 1)


def fprime_centered(x: Ball) -> Ball:
    """Tight enclosure of f' over ``x`` via f'(m) + f''(x)[-r, r]."""
    if not x.rad:
        return _derivs(x, 1)
    d = _derivs(Ball(x.mid), 1)
    return Ball(d.mid, _RU.add(d.rad, _RU.mul(_derivs(x, 2).abs_upper(), x.rad)))


def fsecond_centered(x: Ball) -> Ball:
    """Tight enclosure of f'' over ``x`` via f''(m) + f'''(x)[-r, r]."""
    if not x.rad:
        return _derivs(x, 2)
    d = _derivs(Ball(x.mid), 2)
    return Ball(d.mid, _RU.add(d.rad, _RU.mul(_derivs(x, 3).abs_upper(), x.rad)))


def schwarzian(x: Any):
    """Schwarzian derivative f'''/f' - (3/2)(f''/f')^2.

    Raises :class:`DerivativeVanishes` when the enclosure of f'(x)
    contains zero.
    """
    b, kind = _to_ball(x)
    d1 = fprime_centered(b)
    if d1.contains_zero():
        raise DerivativeVanishes(f"f' may vanish at {b}")
    d2 = _derivs(b, 2)
    d3 = _derivs(b, 3)
    ratio = d2 / d1
    return _out(d3 / d1 - ratio * ratio * Fraction(3, 2), kind)


def g_asym(x: Any):
    """Sinusoidal asymptote of f(x)/x: g(x) = 1 - cos(pi x)/2."""
    b, kind = _to_ball(x)
    c = sincospi(b)[1]
    return _out(1 - c.mul_2exp(-1), kind)


def h_period(x: Any):
    """Periodic correction h(x) = (1 - cos pi x) / (4 - 2 cos pi x), in [0, 1/3]."""
    b, kind = _to_ball(x)
    c = sincospi(b)[1]
    return _out((1 - c) / (4 - c.mul_2exp(1)), kind)


def f_iterate(x: Any, k: int):
    """k-fold composition of :func:`f_ext`."""
    for _ in range(k):
        x = f_ext(x)
    return x


# -- sides ---------------------------------------------------------------------


class Side(str, enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    ZERO = "zero"


def side_of(x: Any) -> Side:
    if isinstance(x, Ball):
        if x.positive():
            return Side.POSITIVE
        if x.negative():
            return Side.NEGATIVE
        if x.is_exact() and x.mid == 0:
            return Side.ZERO
        raise ValueError(f"sign of {x} is not certain")
    if x > 0:
        return Side.POSITIVE
    if x < 0:
        return Side.NEGATIVE
    return Side.ZERO


@dataclass(frozen=True)
class MapPoint:
    """A point of the real line tagged with its half-line; f preserves the tag."""

    x: Any
    side: Side

    @classmethod
    def of(cls, x: Any) -> "MapPoint":
        return cls(x, side_of(x))

    def step(self) -> "MapPoint":
        return MapPoint(f_ext(self.x), self.side)


# -- reduction mod 2 -------------------------------------------------------------


def mod2(x: Any):
    """x mod 2 := x - 2 floor(x/2), in [0, 2).

    A Ball (or mpfr, treated as exact) is reduced rigorously and an
    :class:`AmbiguousFloor` is raised when the ball straddles an even
    integer.  Exact ints and Fractions return a Fraction; floats a float.
    """
    if isinstance(x, float):
        r = math.fmod(x, 2.0)  # exact
        if r < 0:
            r += 2.0
        # a tiny negative x rounds up to 2.0; keep the result in [0, 2)
        return r if r < 2.0 else math.nextafter(2.0, 0.0)
    if _is_int(x) or isinstance(x, Fraction):
        q = Fraction(x)
        return q - 2 * math.floor(q / 2)
    b = Ball(x) if isinstance(x, BigReal) else x
    ctx = context(b.prec)
    k_lo = ctx.floor(ctx.div_2exp(b.lo, 1))
    k_hi = ctx.floor(ctx.div_2exp(b.hi, 1))
    if k_lo != k_hi:
        raise AmbiguousFloor(f"{b} straddles the even integer {2 * int(k_hi)}")
    k = int(k_lo)
    return b - 2 * k
