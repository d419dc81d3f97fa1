"""Equidistribution measurements for orbits of f.

Star discrepancy of finite point sets, the geometric-mean constant
tau = (2 + sqrt 3)/4 of g(x) = 1 - cos(pi x)/2, Crandall's heuristic
product and growth-rate experiments on orbit segments.
"""

from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Iterable, Sequence

import mpmath
import numpy as np
from gmpy2 import mpfr

from .errors import AmbiguousFloor, EmptySequence, PreconditionViolated, QuadratureDivergence
from .kernel import Ball, BigReal, DEFAULT_POLICY, PrecisionPolicy, log, sqrt
from .maps import f_ext, mod2

TAU = (2 + math.sqrt(3)) / 4
LN_TAU = math.log(TAU)
UD_THRESHOLD = 0.05
SEGMENT_MAX_RAD = 2.0**-20


def mod2_float(x: Any) -> float:
    """x mod 2 in [0, 2) as a float (midpoint for balls)."""
    if isinstance(x, Ball):
        x = x.mid
    if isinstance(x, BigReal):
        return float(mod2(Ball(x)).mid)
    if isinstance(x, (int, Fraction)):
        return float(mod2(x))
    return mod2(float(x))


# -- discrepancy --------------------------------------------------------------------


def star_discrepancy(points: Iterable[float], a: float = 0.0, b: float = 1.0) -> float:
    """D*_n = sup_c |#{x_i < c}/n - (c - a)/(b - a)| for points in [a, b].

    Evaluated exactly from the sorted normalized points u_(1) <= ... <= u_(n)
    as max_i max(i/n - u_(i), u_(i) - (i-1)/n).
    """
    u = np.asarray(list(points), dtype=float)
    if u.size == 0:
        raise EmptySequence("star discrepancy of an empty sequence")
    if b <= a:
        raise ValueError("need a < b")
    if np.any(u < a) or np.any(u > b):
        raise ValueError("points must lie in [a, b]")
    u = np.sort((u - a) / (b - a))
    n = u.size
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - u), np.max(u - (i - 1) / n)))


def star_discrepancy_grid(points: Sequence[float], a: float = 0.0, b: float = 1.0, grid: int = 10**5) -> float:
    """Brute-force supremum over a uniform grid of c; an oracle for tests.

    Both one-sided limits at each grid point are taken, so the result is
    within 1/grid of the exact value.
    """
    u = np.sort((np.asarray(points, dtype=float) - a) / (b - a))
    n = u.size
    c = np.linspace(0.0, 1.0, grid + 1)
    below = np.searchsorted(u, c, side="left") / n
    upto = np.searchsorted(u, c, side="right") / n
    return float(max(np.max(np.abs(below - c)), np.max(np.abs(upto - c))))


def van_der_corput(n: int, base: int = 2) -> list[float]:
    out = []
    for k in range(n):
        x, denom = 0.0, 1.0
        while k:
            k, r = divmod(k, base)
            denom *= base
            x += r / denom
        out.append(x)
    return out


# -- tau ------------------------------------------------------------------------------


@dataclass(frozen=True)
class TauConstant:
    """tau = alpha / 4 with alpha = 2 + sqrt 3, plus an independent quadrature value."""

    tau: Ball
    alpha: Ball
    ln_tau: Ball
    quadrature: Any
    nodes: int

    @property
    def agreement(self) -> float:
        return abs(float(self.quadrature - mpmath.mpf(str(self.tau.mid))))


def _trapezoid_mean_log_g(prec: int, max_nodes: int = 2**16) -> tuple[Any, int]:
    """(1/2) * integral over [0, 2] of ln g by the periodic trapezoidal rule.

    ln g is analytic and 2-periodic, so the rule converges geometrically;
    the node count is doubled until two estimates agree to the working
    precision.
    """
    with mpmath.workprec(prec + 20):
        tol = mpmath.mpf(2) ** (-prec)
        prev = None
        n = 8
        while n <= max_nodes:
            s = mpmath.fsum(mpmath.log(1 - mpmath.cospi(mpmath.mpf(2 * k) / n) / 2) for k in range(n))
            est = s / n
            if prev is not None and abs(est - prev) < tol:
                return est, n
            prev = est
            n *= 2
    raise QuadratureDivergence(f"no convergence with {max_nodes} nodes")


@lru_cache(maxsize=None)
def tau_constant(bits: int = 128) -> TauConstant:
    alpha = 2 + sqrt(Ball.exact(3, bits))
    tau = alpha.mul_2exp(-2)
    mean_log, nodes = _trapezoid_mean_log_g(bits)
    with mpmath.workprec(bits):
        quad = mpmath.exp(mean_log)
    return TauConstant(tau, alpha, log(tau), quad, nodes)


def tau_by_adaptive_quadrature(dps: int = 30) -> Any:
    """Cross-check with mpmath's general-purpose tanh-sinh quadrature."""
    with mpmath.workdps(dps):
        integral = mpmath.quad(lambda t: mpmath.log(1 - mpmath.cospi(t) / 2), [0, 1, 2])
        return mpmath.exp(integral / 2)


def crandall_product(k: int) -> float:
    """Partial product prod_{i=1..k} (3/2^i)^(1/2^i); tends to 3/4."""
    if k < 1:
        raise ValueError("k must be at least 1")
    with mpmath.workdps(30):
        p = mpmath.mpf(1)
        for i in range(1, k + 1):
            p *= (mpmath.mpf(3) / 2**i) ** (mpmath.mpf(1) / 2**i)
        return float(p)


# -- orbit segments -------------------------------------------------------------------------


@dataclass(frozen=True)
class OrbitSegment:
    """x, f(x), ..., f^n(x) as balls, with certified residues of the first n values."""

    start: BigReal
    values: tuple
    residues: tuple
    M: BigReal
    growth: Ball

    @property
    def length(self) -> int:
        return len(self.values) - 1


def orbit_segment(x: Any, n: int, policy: PrecisionPolicy = DEFAULT_POLICY) -> OrbitSegment:
    """Iterate f from the exact point ``x`` for ``n`` steps.

    Precision is doubled until every residue mod 2 is decided and every
    value carries a radius below 2^-20; AmbiguousFloor propagates when the
    policy is exhausted.
    """
    if n < 1:
        raise PreconditionViolated("a segment needs n >= 1")
    last_error: Exception | None = None
    for bits in policy.levels():
        x0 = Ball.exact(x, bits) if not isinstance(x, Ball) else x.with_prec(bits)
        if x0.contains_zero():
            raise PreconditionViolated("segment must start away from 0")
        values = [x0]
        try:
            for _ in range(n):
                nxt = f_ext(values[-1])
                if float(nxt.rad) > SEGMENT_MAX_RAD:
                    raise AmbiguousFloor("radius too large")
                values.append(nxt)
            residues = tuple(mod2(v) for v in values[:-1])
        except AmbiguousFloor as exc:
            last_error = exc
            continue
        M = min(v.abs_lower() for v in values[:-1])
        ratio = values[-1] / values[0]
        if not ratio.positive():
            raise PreconditionViolated("orbit changed sign")
        growth = log(ratio) / n
        return OrbitSegment(x0.mid, tuple(values), residues, M, growth)
    raise AmbiguousFloor(f"residues undecided at {policy.max_bits} bits: {last_error}")


def segment_discrepancy(seg: OrbitSegment) -> float:
    return star_discrepancy([float(r.mid) for r in seg.residues], 0.0, 2.0)


# -- growth experiments ---------------------------------------------------------------------------


@dataclass
class GrowthRow:
    x: float
    n: int
    discrepancy: float
    growth: float
    M: float
    bound_lhs: float
    bound_rhs: float

    @property
    def violates(self) -> bool:
        return not self.bound_lhs < self.bound_rhs


def growth_row(seg: OrbitSegment) -> GrowthRow:
    from .rigor import check_theorem5

    chk = check_theorem5(seg)
    return GrowthRow(float(seg.start), seg.length, chk["discrepancy"], float(seg.growth.mid),
                     float(seg.M), chk["lhs"], chk["rhs"])


def growth_experiment(
    starts: Iterable[Any],
    n_steps: int,
    policy: PrecisionPolicy = DEFAULT_POLICY,
    ud_threshold: float = UD_THRESHOLD,
) -> dict:
    """Theorem-5 bookkeeping over many segments.

    Samples whose residues cannot be certified, or whose segment dips
    below |x| = 1/3, are skipped and counted.
    """
    rows: list[GrowthRow] = []
    skipped = {"ambiguous": 0, "precondition": 0}
    for x in starts:
        try:
            seg = orbit_segment(x, n_steps, policy)
            rows.append(growth_row(seg))
        except AmbiguousFloor:
            skipped["ambiguous"] += 1
        except PreconditionViolated:
            skipped["precondition"] += 1
    violations = [r for r in rows if r.violates]
    summary = {
        "samples": len(rows),
        "skipped": skipped,
        "violations": len(violations),
        "ud_threshold": ud_threshold,
        "ud_fraction": sum(r.discrepancy < ud_threshold for r in rows) / len(rows) if rows else 0.0,
        "mean_growth": float(np.mean([r.growth for r in rows])) if rows else float("nan"),
        "mean_discrepancy": float(np.mean([r.discrepancy for r in rows])) if rows else float("nan"),
        "ln_tau": LN_TAU,
        "ln_sqrt3_over_2": math.log(math.sqrt(3) / 2),
    }
    return {"rows": rows, "summary": summary}


def random_starts(count: int, lo: float, hi: float, seed: int = 0) -> list[float]:
    rng = random.Random(seed)
    return [rng.uniform(lo, hi) for _ in range(count)]


def growth_csv(rows: Iterable[GrowthRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "n", "D*", "growth", "M", "bound_lhs", "bound_rhs"])
    for r in rows:
        w.writerow([repr(r.x), r.n, f"{r.discrepancy:.12g}", f"{r.growth:.12g}", f"{r.M:.12g}",
                    f"{r.bound_lhs:.12g}", f"{r.bound_rhs:.12g}"])
    return buf.getvalue()


# -- Koksma -------------------------------------------------------------------------------------------

KOKSMA_VARIATION = 2 * math.log(3)


def koksma_gap(points: Sequence[float]) -> tuple[float, float]:
    """|mean of ln g(x_i) - ln tau| and the Koksma bound V * D*_n with V = 2 ln 3."""
    xs = np.asarray(points, dtype=float)
    mean = float(np.mean(np.log(1 - np.cos(np.pi * xs) / 2)))
    return abs(mean - LN_TAU), KOKSMA_VARIATION * star_discrepancy(xs, 0.0, 2.0)
