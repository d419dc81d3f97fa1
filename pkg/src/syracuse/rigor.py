"""Interval-arithmetic verification of concrete inequalities about f.

Each check returns :class:`VerificationCertificate` objects.  A verdict of
``certified`` means every inequality involved was decided by ball
arithmetic; ``failed`` means a ball evaluation produced a definite
counterexample; ``inconclusive`` means the subdivision budget ran out.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Sequence

from gmpy2 import mpfr

from . import stats
from .critical import critical_point, mu, nu, x1_fixed_point
from .errors import BracketFailure, PreconditionViolated
from .kernel import Ball, BigReal, context, log, pi_ball
from .maps import f_ext, fprime_centered, fsecond_centered, t_map

SUBDIVISION_BUDGET = 2**14
LEMMA2_A = Fraction(7, 2)

CERTIFIED = "certified"
FAILED = "failed"
INCONCLUSIVE = "inconclusive"


@dataclass
class VerificationCertificate:
    claim: str
    params: dict
    verdict: str
    bits: int
    subdivisions: int = 0
    values: dict = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return self.verdict == CERTIFIED

    def as_json(self) -> dict:
        return {
            "claim": self.claim,
            "params": {k: str(v) if isinstance(v, Fraction) else v for k, v in self.params.items()},
            "verdict": self.verdict,
            "bits": self.bits,
            "subdivisions": self.subdivisions,
            "values": self.values,
        }


def certificates_json(certs: Iterable[VerificationCertificate]) -> str:
    return json.dumps([c.as_json() for c in certs], indent=2)


def _fmt(b: Ball, digits: int = 12) -> str:
    return f"{b.mid:.{digits}g}"


# -- sign certification by adaptive subdivision ---------------------------------


def certify_sign(
    func: Callable[[Ball], Ball],
    lo: BigReal,
    hi: BigReal,
    sign: int,
    bits: int,
    budget: int = SUBDIVISION_BUDGET,
) -> tuple[str, int]:
    """Certify ``sign * func > 0`` on ``[lo, hi]``; returns (verdict, pieces used)."""
    ctx = context(bits)
    stack = [(ctx.plus(lo), ctx.plus(hi))]
    used = 0
    while stack:
        a, b = stack.pop()
        used += 1
        if used > budget:
            return INCONCLUSIVE, used
        v = func(Ball.from_interval(a, b, bits))
        if (v.positive() if sign > 0 else v.negative()):
            continue
        m = ctx.div_2exp(ctx.add(a, b), 1)
        pv = func(Ball(m))
        if (pv.negative() if sign > 0 else pv.positive()):
            return FAILED, used
        if m <= a or m >= b:
            return INCONCLUSIVE, used
        stack.append((m, b))
        stack.append((a, m))
    return CERTIFIED, used


def _combine(*verdicts: str) -> str:
    if FAILED in verdicts:
        return FAILED
    if INCONCLUSIVE in verdicts:
        return INCONCLUSIVE
    return CERTIFIED


# -- Lemma 1: location of critical points ---------------------------------------


def verify_lemma1(n: int, bits: int = 128) -> VerificationCertificate:
    """Certify that c_n is the only zero of f' in (n - 1/2, n + 1/2) and lies in its bracket.

    For even n: f' < 0 on [n - 1/2, n - 1/(pi^2 n)], f' > 0 on [n, n + 1/2].
    For odd n:  f' > 0 on [n - 1/2, n],  f' < 0 on [n + 3/(pi^2 n), n + 1/2].
    Together with f'' of constant sign on the bracket this pins down c_n.
    For n = 1 the left part starts at 0, so c_1 is the first critical point.
    """
    if n < 1:
        raise ValueError("n must be positive")
    pi = pi_ball(bits)
    left = Ball.exact(Fraction(2 * n - 1, 2) if n > 1 else 0, bits)
    right = Ball.exact(Fraction(2 * n + 1, 2), bits)
    nb = Ball.exact(n, bits)
    used = 0
    if n % 2 == 0:
        inner = n - 1 / (pi * pi * n)
        v1, u1 = certify_sign(fprime_centered, left.mid, inner.hi, -1, bits)
        v2, u2 = certify_sign(fprime_centered, nb.mid, right.mid, 1, bits)
        blo, bhi = inner.hi, nb.mid
        curvature = 1
    else:
        inner = n + 3 / (pi * pi * n)
        v1, u1 = certify_sign(fprime_centered, left.mid, nb.mid, 1, bits)
        v2, u2 = certify_sign(fprime_centered, inner.lo, right.mid, -1, bits)
        blo, bhi = nb.mid, inner.lo
        curvature = -1
    v3, u3 = certify_sign(fsecond_centered, blo, bhi, curvature, bits)
    used = u1 + u2 + u3
    verdict = _combine(v1, v2, v3)
    values = {}
    if verdict == CERTIFIED:
        c = critical_point(n, bits).enclosure
        inside = c.lo > blo and c.hi < bhi
        verdict = CERTIFIED if inside else FAILED
        values = {"c_n": _fmt(c, 15), "bracket": [_fmt(Ball(blo), 15), _fmt(Ball(bhi), 15)]}
    return VerificationCertificate("lemma1", {"n": n}, verdict, bits, used, values)


# -- Lemma 2: stable intervals J^a_n ----------------------------------------------


def j_interval(n: int, a: Fraction, bits: int) -> tuple[Ball, Ball]:
    """End points of J^a_n = [n, n + a/(pi^2 n)] as balls."""
    pi = pi_ball(bits)
    return Ball.exact(n, bits), n + Ball.exact(Fraction(a), bits) / (pi * pi * n)


def verify_lemma2(n: int, a: Fraction = LEMMA2_A, bits: int = 128) -> VerificationCertificate:
    """Certify f(J^a_n) is contained in J^a_{f(n)}.

    Even n: f' > 0 on J, so f(J) = [f(n), f(right)].  Odd n: f increases up
    to c_n and decreases after it, so f(J) lies in
    [min(f(n), f(right)), f(c_n)].
    """
    a = Fraction(a)
    if not Fraction(27, 8) < a < 6:
        raise ValueError("a must lie in (27/8, 6)")
    if n < 1:
        raise ValueError("n must be positive")
    _, right = j_interval(n, a, bits)
    fn = t_map(n)
    _, target = j_interval(fn, a, bits)
    f_right = f_ext(right)
    params = {"n": n, "a": a}
    if n % 2 == 0:
        v, used = certify_sign(fprime_centered, mpfr(n, bits), right.hi, 1, bits)
        upper_ok = f_right.hi <= target.lo
        upper_bad = f_right.lo > target.hi
        verdict = _combine(v, CERTIFIED if upper_ok else FAILED if upper_bad else INCONCLUSIVE)
        values = {"f(right)": _fmt(f_right), "J'_right": _fmt(target)}
        return VerificationCertificate("lemma2", params, verdict, bits, used, values)
    c = critical_point(n, bits).enclosure
    if not (c.lo > n and c.hi < right.lo):
        return VerificationCertificate("lemma2", params, FAILED, bits, 0, {"c_n": _fmt(c)})
    verdict, used = _unimodal(n, c, right, bits)
    f_c = f_ext(c)
    lower_ok = f_right.lo >= fn
    upper_ok = f_c.hi <= target.lo
    lower_bad = f_right.hi < fn
    upper_bad = f_c.lo > target.hi
    checks = [
        CERTIFIED if lower_ok else FAILED if lower_bad else INCONCLUSIVE,
        CERTIFIED if upper_ok else FAILED if upper_bad else INCONCLUSIVE,
    ]
    values = {"c_n": _fmt(c), "f(c_n)": _fmt(f_c), "f(right)": _fmt(f_right), "J'_right": _fmt(target)}
    return VerificationCertificate("lemma2", params, _combine(verdict, *checks), bits, used, values)


def _unimodal(n: int, c: Ball, right: Ball, bits: int) -> tuple[str, int]:
    """f' > 0 on [n, c) and f' < 0 on (c, right], via f'' < 0 near c."""
    ctx = context(bits)
    width = ctx.sub(right.hi, mpfr(n, bits))
    w = ctx.div_2exp(width, 6)
    n_lo = ctx.sub(c.lo, w)
    n_hi = ctx.add(c.hi, w)
    if n_lo <= n:
        n_lo = ctx.div_2exp(ctx.add(c.lo, mpfr(n, bits)), 1)
    if n_hi >= right.hi:
        n_hi = ctx.div_2exp(ctx.add(c.hi, right.hi), 1)
    v1, u1 = certify_sign(fsecond_centered, n_lo, n_hi, -1, bits)
    sign_ok = fprime_centered(Ball(c.lo)).positive() and fprime_centered(Ball(c.hi)).negative()
    v2, u2 = certify_sign(fprime_centered, mpfr(n, bits), n_lo, 1, bits)
    v3, u3 = certify_sign(fprime_centered, n_hi, right.hi, -1, bits)
    return _combine(v1, v2, v3, CERTIFIED if sign_ok else INCONCLUSIVE), u1 + u2 + u3


def verify_unimodality(n: int, a: Fraction = LEMMA2_A, bits: int = 128) -> VerificationCertificate:
    """f increases left of c_n and decreases right of it on J^a_n (odd n)."""
    if n < 1 or n % 2 == 0:
        raise ValueError("unimodality is checked for odd positive n")
    _, right = j_interval(n, a, bits)
    c = critical_point(n, bits).enclosure
    verdict, used = _unimodal(n, c, right, bits)
    return VerificationCertificate("unimodal", {"n": n, "a": Fraction(a)}, verdict, bits, used)


def lemma2_polynomial_conditions(n: int, a: Fraction = LEMMA2_A, bits: int = 128) -> dict:
    """Second method for Lemma 2: signs of the auxiliary quantities B and C.

    B = pi^2 n (2 (a - 6) n + a) + 2 a^2 controls the right end point, and
    C = 4 pi^2 n^2 ((27 - 8a) n + 9) + 81 n + 27 the value at c_n; the
    inclusion follows when both are negative.
    """
    a = Fraction(a)
    pi2 = pi_ball(bits) * pi_ball(bits)
    B = pi2 * n * (2 * (a - 6) * n + a) + 2 * a * a
    C = pi2 * 4 * n * n * ((27 - 8 * a) * n + 9) + 81 * n + 27
    return {"B": B, "C": C, "B_negative": B.negative(), "C_negative": C.negative()}


def verify_lemma2_chain(n: int = 7, k_max: int = 20, a: Fraction = LEMMA2_A, bits: int = 128,
                        samples: int = 64) -> VerificationCertificate:
    """f^k(J_n) in J_{T^k(n)} for k <= k_max.

    Certified by chaining one-step certificates along the integer orbit;
    additionally ``samples`` points of J_n are pushed through f^k and
    checked against each J_{T^k(n)} with ball arithmetic.
    """
    orbit = [n]
    for _ in range(k_max):
        orbit.append(t_map(orbit[-1]))
    steps = [verify_lemma2(m, a, bits) for m in orbit[:-1]]
    chain = _combine(*(s.verdict for s in steps))
    _, right = j_interval(n, a, bits)
    ctx = context(bits)
    width = ctx.sub(right.lo, mpfr(n, bits))
    sample_ok = True
    # the integer end point itself follows the integer orbit exactly
    for j in range(1, samples + 1):
        x = Ball(ctx.add(mpfr(n, bits), ctx.div(ctx.mul(width, j), samples)))
        for k in range(1, k_max + 1):
            x = f_ext(x)
            lo, hi = j_interval(orbit[k], a, bits)
            if not (x.lo >= lo.mid and x.hi <= hi.lo):
                sample_ok = False
                break
    verdict = _combine(chain, CERTIFIED if sample_ok else FAILED)
    return VerificationCertificate(
        "lemma2_chain",
        {"n": n, "k_max": k_max, "a": Fraction(a)},
        verdict,
        bits,
        sum(s.subdivisions for s in steps),
        {"orbit": orbit, "samples": samples},
    )


# -- invariant intervals --------------------------------------------------------------


def _certify_invariant(a: Ball, b: Ball, bits: int, budget: int = SUBDIVISION_BUDGET) -> tuple[str, int]:
    """f([a, b]) in [a, b] for fixed points a < b of f.

    Pieces touching an end point must be increasing, so their image starts
    at the fixed point itself; interior pieces are enclosed directly.
    """
    ctx = context(bits)
    inner_lo, inner_hi = a.hi, b.lo

    def inside(x: Ball) -> bool:
        return x.lo >= inner_lo and x.hi <= inner_hi

    stack = [(a.lo, b.hi)]
    used = 0
    while stack:
        p, q = stack.pop()
        used += 1
        if used > budget:
            return INCONCLUSIVE, used
        piece = Ball.from_interval(p, q, bits)
        touches_a = p <= a.hi
        touches_b = q >= b.lo
        ok = False
        if touches_a or touches_b:
            if fprime_centered(piece).positive():
                ok = (not touches_a or touches_b or inside(f_ext(Ball(q)))) and (
                    not touches_b or touches_a or inside(f_ext(Ball(p)))
                )
        else:
            ok = inside(f_ext(piece))
        if ok:
            continue
        m = ctx.div_2exp(ctx.add(p, q), 1)
        if m <= p or m >= q:
            return INCONCLUSIVE, used
        stack.append((m, q))
        stack.append((p, m))
    return CERTIFIED, used


def verify_invariant_intervals(bits: int = 128) -> list[VerificationCertificate]:
    """[0, mu1], [mu1, mu3], [-1, 0] and [nu1, -1] are mapped into themselves."""
    zero = Ball.exact(0, bits)
    minus_one = Ball.exact(-1, bits)
    m1, m3, n1 = mu(1, bits).enclosure, mu(3, bits).enclosure, nu(1, bits).enclosure
    cases = [
        ("[0, mu1]", zero, m1),
        ("[mu1, mu3]", m1, m3),
        ("[-1, 0]", minus_one, zero),
        ("[nu1, -1]", n1, minus_one),
    ]
    certs = []
    for name, lo, hi in cases:
        verdict, used = _certify_invariant(lo, hi, bits)
        certs.append(
            VerificationCertificate(
                "invariant_interval",
                {"interval": name},
                verdict,
                bits,
                used,
                {"lo": _fmt(lo, 15), "hi": _fmt(hi, 15)},
            )
        )
    # f is monotone on [nu1, 0]; the sign of f' there is increasing
    verdict, used = certify_sign(fprime_centered, n1.lo, zero.mid, 1, bits)
    certs.append(
        VerificationCertificate(
            "monotone", {"interval": "[nu1, 0]", "direction": "increasing"}, verdict, bits, used
        )
    )
    return certs


# -- Theorem 2 image chains --------------------------------------------------------------


def _iterate(x: Ball, k: int) -> Ball:
    for _ in range(k):
        x = f_ext(x)
    return x


def theorem2_values(bits: int = 128) -> dict:
    """Enclosures of the iterates used in the odd-critical-point case analysis."""
    pi = pi_ball(bits)
    pi2 = pi * pi
    c5 = critical_point(5, bits).enclosure
    c13 = critical_point(13, bits).enclosure
    x1 = x1_fixed_point(bits).enclosure
    j16 = 16 + Ball.exact(7, bits) / (pi2 * 32)
    j20 = 20 + Ball.exact(7, bits) / (pi2 * 40)
    j40 = 40 + Ball.exact(7, bits) / (pi2 * 80)
    return {
        "c5": c5,
        "c13": c13,
        "x1": x1,
        "f3(c13)": _iterate(c13, 3),
        "f7(c13)": _iterate(c13, 7),
        "f4(16+7/(32pi^2))": _iterate(j16, 4),
        "f3(40+7/(80pi^2))": _iterate(j40, 3),
        "f7(40+7/(80pi^2))": _iterate(j40, 7),
        "f6(20+7/(40pi^2))": _iterate(j20, 6),
    }


def verify_theorem2_images(bits: int = 128) -> list[VerificationCertificate]:
    """Strict inequalities of the three cases plus the near miss starting from 20."""
    v = theorem2_values(bits)
    x1, c5 = v["x1"], v["c5"]
    claims = [
        ("f3(c13) < c5", v["f3(c13)"], c5, -1),
        ("f7(c13) < x1", v["f7(c13)"], x1, -1),
        ("f4(16+7/(32pi^2)) < x1", v["f4(16+7/(32pi^2))"], x1, -1),
        ("f3(40+7/(80pi^2)) < c5", v["f3(40+7/(80pi^2))"], c5, -1),
        ("f7(40+7/(80pi^2)) < x1", v["f7(40+7/(80pi^2))"], x1, -1),
        ("f6(20+7/(40pi^2)) > x1", v["f6(20+7/(40pi^2))"], x1, 1),
    ]
    certs = []
    for name, lhs, rhs, sign in claims:
        if sign < 0:
            verdict = CERTIFIED if lhs.hi < rhs.lo else FAILED if lhs.lo > rhs.hi else INCONCLUSIVE
        else:
            verdict = CERTIFIED if lhs.lo > rhs.hi else FAILED if lhs.hi < rhs.lo else INCONCLUSIVE
        certs.append(
            VerificationCertificate(
                "theorem2_image",
                {"inequality": name},
                verdict,
                bits,
                0,
                {"lhs": _fmt(lhs, 10), "rhs": _fmt(rhs, 10)},
            )
        )
    return certs


# -- Theorems 5 and 6 on concrete sequences ------------------------------------------------


def check_theorem5(segment: "stats.OrbitSegment") -> dict:
    """Compare |(1/n) ln(f^n(x)/x) - ln tau| with 2 ln 3 D*_n - ln(1 - 1/(3M)).

    The second quantity is a proven upper bound, so ``holds`` must be True.
    """
    n = segment.length
    if n < 1:
        raise PreconditionViolated("segment must contain at least one step")
    M = segment.M
    if not Ball(M) > Fraction(1, 3):
        raise PreconditionViolated(f"min |f^i(x)| = {float(M):.4g} is not above 1/3")
    if segment.residues is None:
        raise PreconditionViolated("mod-2 residues are not certified")
    d = stats.star_discrepancy([float(r.mid) for r in segment.residues], 0.0, 2.0)
    d_err = max(float(r.rad) for r in segment.residues) / 2.0
    ln_tau = stats.tau_constant(segment.values[0].prec).ln_tau
    growth = segment.growth
    lhs = abs(growth - ln_tau)
    rhs_tail = -log(1 - 1 / (Ball(M) * 3))
    rhs_lo = 2 * math.log(3) * max(d - d_err, 0.0) + float(rhs_tail.lo)
    lhs_hi = float(lhs.hi)
    return {
        "n": n,
        "lhs": float(lhs.mid),
        "rhs": 2 * math.log(3) * d + float(rhs_tail.mid),
        "discrepancy": d,
        "M": float(M),
        "holds": lhs_hi < rhs_lo,
    }


def theorem6_bound(a: float) -> float:
    """Lower bound ln(1 + (a-1)(1-tau)/(a tau)) / (2 ln 3) on the liminf of D*_n."""
    tau = stats.TAU
    if a <= 1:
        raise ValueError("a must exceed 1")
    return math.log1p((a - 1) * (1 - tau) / (a * tau)) / (2 * math.log(3))


def theorem6_threshold() -> float:
    """The magnitude 1/(3(1 - tau)) above which orbits cannot be u.d. mod 2."""
    return 1 / (3 * (1 - stats.TAU))


def check_theorem6(values: Sequence[Any], a: float) -> dict:
    """Empirical D*_n of an orbit prefix against the asymptotic lower bound.

    Every element must satisfy |x| >= a/(3(1 - tau)).  Only prefixes are
    computable, so the comparison is reported rather than asserted.
    """
    threshold = a * theorem6_threshold()
    floats = [float(v.mid) if isinstance(v, Ball) else float(v) for v in values]
    if not floats:
        raise PreconditionViolated("empty orbit prefix")
    worst = min(abs(v) for v in floats)
    if worst < threshold:
        raise PreconditionViolated(f"|f^i(x)| = {worst:.4g} is below a/(3(1-tau)) = {threshold:.4g}")
    residues = [stats.mod2_float(v) for v in values]
    d = stats.star_discrepancy(residues, 0.0, 2.0)
    bound = theorem6_bound(a)
    return {"a": a, "threshold": threshold, "bound": bound, "discrepancy": d, "exceeds": d > bound}


# -- suites ------------------------------------------------------------------------------------


def run_suite(n_max: int = 10**4, bits: int = 128, chain_n: int = 7, chain_k: int = 20,
              unimodal_max: int = 100) -> list[VerificationCertificate]:
    """All verification claims; ``verify --strict`` requires every verdict certified."""
    certs: list[VerificationCertificate] = []
    lemma1 = [verify_lemma1(n, bits) for n in range(1, n_max + 1)]
    lemma2 = [verify_lemma2(n, LEMMA2_A, bits) for n in range(1, n_max + 1)]
    certs.append(_aggregate("lemma1_sweep", {"n_max": n_max}, lemma1, bits))
    certs.append(_aggregate("lemma2_sweep", {"n_max": n_max, "a": LEMMA2_A}, lemma2, bits))
    certs.extend(verify_invariant_intervals(bits))
    certs.extend(verify_theorem2_images(bits))
    certs.append(verify_lemma2_chain(chain_n, chain_k, LEMMA2_A, bits))
    uni = [verify_unimodality(n, LEMMA2_A, bits) for n in range(1, unimodal_max + 1, 2)]
    certs.append(_aggregate("unimodal_sweep", {"n_max": unimodal_max}, uni, bits))
    return certs


def _aggregate(name: str, params: dict, certs: list[VerificationCertificate], bits: int) -> VerificationCertificate:
    bad = [c.params.get("n") for c in certs if not c.certified]
    verdict = _combine(*(c.verdict for c in certs)) if certs else CERTIFIED
    return VerificationCertificate(
        name, params, verdict, bits, sum(c.subdivisions for c in certs), {"not_certified": bad[:50]}
    )
