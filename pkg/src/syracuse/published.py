"""Published reference data used by ``table1`` and ``paperlists``."""

from __future__ import annotations

from fractions import Fraction

from .integer import u_orbit

# Indices n <= 2000 whose critical point c_n is attracted by the cycle A2.
A2_INDICES = (
    1, 3, 5, 382, 496, 502, 504, 508, 530, 550, 644, 646, 656, 666, 754,
    830, 874, 1078, 1150, 1214, 1534, 1590, 1598, 1614, 1662, 1854,
)
A2_SCAN_MAX = 2000

# Listed indices (besides n = -2 mod 64) where the orbit of c_n leaves that of n.
NOT_PROCHE_PREFIX = (54, 334, 338, 366, 390, 442, 444, 470, 484, 486, 496, 500)

# Even negative n whose critical point escapes the parity rule, with its attractor.
NEGATIVE_EXCEPTIONS = (
    (-34, "B3"), (-66, "B1"), (-98, "B3"), (-130, "NU1"), (-132, "B3"),
    (-162, "B1"), (-174, "NU1"), (-194, "B1"), (-202, "NU1"), (-226, "NU1"),
)
NEGATIVE_DECORRELATED_PREFIX = (-66, -130, -174, -194, -258)

# Attracting points and cycles on the negative half-line with printed multipliers.
TABLE1 = (
    ("ZERO", 1, "0.5"),
    ("NU1", 1, "0.385708"),
    ("B1", 3, "0.036389"),
    ("B2", 3, "0.866135"),
    ("B3", 11, "0.003773"),
    ("B4", 11, "0.926287"),
)
REPELLING_INTEGER_CYCLES = ((-5, Fraction(9, 8)), (-17, Fraction(2187, 2048)))

_ODD_RULE = {1: "NU1", 5: "B1", 17: "B3"}
_EVEN_RULE = {1: "ZERO", 5: "B2", 17: "B4"}


def integer_target(n: int) -> int:
    """The point -1, -5 or -17 first reached by the integer orbit of n < 0."""
    if n >= 0:
        raise ValueError("n must be negative")
    return -u_orbit(-n).values[-1]


def negative_rule(n: int) -> str:
    """Attractor predicted for c_n (n < 0) from the parity of n and its integer target."""
    table = _ODD_RULE if n % 2 else _EVEN_RULE
    return table[-integer_target(n)]
