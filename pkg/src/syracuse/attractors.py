"""Known attracting cycles of f, certified trap neighbourhoods and basin
classification of arbitrary starting points.

Attraction is decided rigorously: the ball enclosing the orbit must land
inside a *trap*, an interval I around a cycle point with
f^p(I) contained in I and |(f^p)'| < 1 on I (both checked with ball
arithmetic).  If the orbit ball grows too wide first, the whole orbit is
recomputed at higher precision.
"""

from __future__ import annotations

import enum
import functools
import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Sequence

from gmpy2 import mpfr

from .critical import certified_root, critical_point
from .errors import CycleNotFound, InsufficientPrecision, NotACycle
from .kernel import DEFAULT_POLICY, Ball, BigReal, PrecisionPolicy, _RU, context
from .maps import _derivs, f_derivatives, f_ext, fprime_centered

log = logging.getLogger(__name__)

REGISTRY_BITS = 128
MAX_TRAP_EXP = 40


@dataclass(frozen=True)
class Trap:
    """Interval around a cycle point that f^period maps into itself, contracting."""

    label: str
    center: Ball
    radius_exp: int
    lo: BigReal
    hi: BigReal

    def holds(self, x: Ball) -> bool:
        return self.lo <= x.lo and x.hi <= self.hi


@dataclass(frozen=True)
class Attractor:
    """An attracting fixed point or cycle of f with certified data."""

    label: str
    period: int
    points: tuple  # Ball enclosures, points[0] is the anchor
    multiplier: Any  # Ball, or Fraction for integer cycles
    side: str
    traps: tuple = field(default=(), compare=False)

    @property
    def anchor(self) -> Ball:
        return self.points[0]


# seeds: printed leading digits of one cycle point, as (truncated value, digits)
_SEEDS = {
    "A2": ("1.192", 2, "positive"),
    "NU1": ("-1.277", 1, "negative"),
    "B1": ("-5.046002", 3, "negative"),
    "B2": ("-4.998739", 3, "negative"),
    "B3": ("-17.002728", 11, "negative"),
    "B4": ("-16.999991", 11, "negative"),
}

POSITIVE_LABELS = ("ZERO", "A1", "A2")
NEGATIVE_LABELS = ("ZERO", "NU1", "B1", "B2", "B3", "B4")


def _seed_bracket(text: str) -> tuple[Fraction, Fraction]:
    """Values printed as ``d.dddd...`` lie between the truncation and the next digit."""
    value = Fraction(text)
    ulp = Fraction(1, 10 ** len(text.split(".")[1]))
    return (value - ulp, value) if value < 0 else (value, value + ulp)


def _iterate(x: Ball, k: int) -> Ball:
    for _ in range(k):
        x = f_ext(x)
    return x


def _cycle_points(anchor: Ball, period: int) -> tuple:
    pts = [anchor]
    for _ in range(period - 1):
        pts.append(f_ext(pts[-1]))
    return tuple(pts)


def _ball_multiplier(points: Sequence[Ball]) -> Ball:
    m = Ball.exact(1, points[0].prec)
    for p in points:
        m = m * fprime_centered(p)
    return m


def find_cycle(seed: str, period: int, bits: int = REGISTRY_BITS) -> Ball:
    """Certified enclosure of the period-``period`` point whose leading digits are ``seed``."""
    lo, hi = _seed_bracket(seed)

    def g(x: Ball) -> Ball:
        return _iterate(x, period) - x

    def dg(x: Ball) -> Ball:
        d = Ball.exact(1, x.prec)
        for _ in range(period):
            d = d * _derivs(x, 1)
            x = f_ext(x)
        return d - 1

    try:
        return certified_root(g, dg, Ball.exact(lo, bits).mid, Ball.exact(hi, bits).mid, bits)
    except Exception as exc:  # pragma: no cover - documented seeds always bracket
        raise CycleNotFound(f"no period-{period} point near {seed}: {exc}") from exc


def _find_trap(label: str, center: Ball, period: int) -> Trap | None:
    bits = center.prec
    for e in range(1, MAX_TRAP_EXP + 1):
        rho = _RU.mul_2exp(mpfr(1, 2), -e)
        box = Ball(center.mid, _RU.add(rho, center.rad))
        x = box
        deriv = Ball.exact(1, bits)
        for _ in range(period):
            deriv = deriv * fprime_centered(x)
            x = f_ext(x)
        if abs(deriv).hi < 1 and x.within(box):
            return Trap(label, center, e, box.lo, box.hi)
    return None


def _traps_for(label: str, points: Sequence[Ball], period: int) -> tuple:
    traps = []
    for p in points:
        t = _find_trap(label, p, period)
        if t is not None:
            traps.append(t)
    return tuple(traps)


def _build(label: str, bits: int) -> Attractor:
    if label == "ZERO":
        z = Ball.exact(0, bits)
        return Attractor("ZERO", 1, (z,), Fraction(1, 2), "both", _traps_for("ZERO", (z,), 1))
    if label == "A1":
        pts = (Ball.exact(1, bits), Ball.exact(2, bits))
        return Attractor("A1", 2, pts, Fraction(3, 4), "positive", _traps_for("A1", pts, 2))
    seed, period, side = _SEEDS[label]
    anchor = find_cycle(seed, period, bits)
    pts = _cycle_points(anchor, period)
    return Attractor(label, period, pts, _ball_multiplier(pts), side, _traps_for(label, pts, period))


@functools.lru_cache(maxsize=None)
def attractor(label: str, bits: int = REGISTRY_BITS) -> Attractor:
    """Registry entry ``label`` recomputed at ``bits`` from its seed."""
    return _build(label, bits)


def known_attractors(side: str, bits: int = REGISTRY_BITS) -> list[Attractor]:
    """Registry of attracting cycles on the ``positive`` or ``negative`` half-line."""
    labels = {"positive": POSITIVE_LABELS, "negative": NEGATIVE_LABELS}[side]
    return [attractor(lbl, bits) for lbl in labels]


def cycle_multiplier(cycle: Sequence[Any], exact_rational: bool = False, tol: float = 1e-12):
    """Product of f' over a cycle.

    Integer cycles give an exact :class:`~fractions.Fraction` (f' is 3/2 at
    odd and 1/2 at even integers).  Otherwise ``cycle`` holds Balls (or
    numbers) and a Ball is returned.
    """
    pts = list(cycle)
    if not pts:
        raise NotACycle("empty cycle")
    if all(isinstance(p, int) for p in pts):
        for a, b in zip(pts, pts[1:] + pts[:1]):
            if f_ext(a) != b:
                raise NotACycle(f"f({a}) = {f_ext(a)} != {b}")
        prod = Fraction(1)
        for p in pts:
            prod *= f_derivatives(p, 1)
        return prod if exact_rational else Ball.exact(prod, REGISTRY_BITS)
    balls = [p if isinstance(p, Ball) else Ball.exact(p, REGISTRY_BITS) for p in pts]
    for a, b in zip(balls, balls[1:] + balls[:1]):
        img = f_ext(a)
        if not img.overlaps(b) and abs(float(img.mid) - float(b.mid)) > tol:
            raise NotACycle(f"f({a}) = {img} does not return to {b}")
    return _ball_multiplier(balls)


# -- classification --------------------------------------------------------------


class Outcome(str, enum.Enum):
    UNRESOLVED = "Unresolved"
    CAP_EXCEEDED = "CapExceeded"
    MAGNITUDE_ESCAPE = "MagnitudeEscape"


@dataclass(frozen=True)
class ClassificationOutcome:
    start: Any
    result: str
    iterations: int
    bits_used: int
    proche: bool | None = None
    first_divergence_step: int | None = None
    diagnostics: str = ""

    @property
    def attracted(self) -> bool:
        return self.result not in {o.value for o in Outcome}


@functools.lru_cache(maxsize=None)
def _trap_table(side: str) -> tuple:
    traps = []
    for a in known_attractors(side):
        traps.extend(a.traps)
    return tuple(sorted(traps, key=lambda t: float(t.lo)))


_ESCALATE_RAD = _RU.mul_2exp(mpfr(1, 2), -30)

# correlation with the integer orbit is followed until it reaches a known cycle
CORRELATION_DISTANCE = 0.5
TERMINAL_INTEGERS = frozenset({1, -1, -5, -17})


def _run(
    start: Ball,
    traps: tuple,
    max_iter: int,
    max_magnitude: float,
    track: int | None,
):
    """Iterate one orbit ball; returns (result, iterations, proche, first_divergence)."""
    centers = [(float(t.lo), float(t.hi), t) for t in traps]
    x = start
    n_k = track
    first_div = None
    for k in range(max_iter + 1):
        xm = float(x.mid)
        if n_k is not None:
            if abs(xm - n_k) > CORRELATION_DISTANCE:
                first_div = k
                n_k = None
            elif n_k in TERMINAL_INTEGERS:
                n_k = None
        for lo, hi, t in centers:
            if lo <= xm <= hi and t.holds(x):
                return t.label, k, first_div
        if abs(xm) > max_magnitude:
            return Outcome.MAGNITUDE_ESCAPE.value, k, first_div
        if x.rad > _ESCALATE_RAD:
            raise InsufficientPrecision(f"orbit ball radius {float(x.rad):.3g} at step {k}")
        x = f_ext(x)
        if n_k is not None:
            n_k = f_ext(n_k)
    return Outcome.CAP_EXCEEDED.value, max_iter, first_div


def classify_orbit(
    x0: Any,
    policy: PrecisionPolicy = DEFAULT_POLICY,
    max_iter: int = 10**6,
    max_magnitude: float = 1e30,
    track: int | None = None,
) -> ClassificationOutcome:
    """Decide which registry attractor the orbit of ``x0`` converges to.

    ``x0`` is a number, a Ball, or a callable ``bits -> Ball`` so that the
    starting point itself can be recomputed when precision is escalated.
    With ``track`` set to an integer, the orbit is compared step by step
    with the integer orbit of ``track`` until that orbit reaches 1, -1, -5
    or -17; the first step where they differ by more than 1/2 is reported.
    """
    if callable(x0):
        make = x0
    else:
        make = lambda bits: x0 if isinstance(x0, Ball) else Ball.exact(x0, bits)  # noqa: E731
    first = make(policy.start_bits)
    if first.contains_zero():
        raise ValueError("starting point must be nonzero")
    side = "positive" if first.positive() else "negative"
    traps = _trap_table(side)
    last_error = ""
    for bits in policy.levels():
        start = make(bits)
        try:
            result, iters, first_div = _run(start, traps, max_iter, max_magnitude, track)
        except InsufficientPrecision as exc:
            last_error = str(exc)
            log.debug("escalating past %d bits: %s", bits, exc)
            continue
        proche = None if track is None else first_div is None
        return ClassificationOutcome(
            start if not callable(x0) else start.mid, result, iters, bits, proche, first_div
        )
    return ClassificationOutcome(
        first.mid,
        Outcome.UNRESOLVED.value,
        0,
        policy.max_bits,
        diagnostics=f"precision exhausted: {last_error}",
    )


# -- scans -----------------------------------------------------------------------


@dataclass(frozen=True)
class ScanRecord:
    n: int
    outcome: ClassificationOutcome

    @property
    def label(self) -> str:
        return self.outcome.result

    @property
    def proche(self) -> bool | None:
        return self.outcome.proche

    def as_json(self) -> dict:
        o = self.outcome
        return {
            "n": self.n,
            "label": o.result,
            "iterations": o.iterations,
            "bits": o.bits_used,
            "proche": o.proche,
            "first_divergence_step": o.first_divergence_step,
        }


def classify_critical(
    n: int,
    policy: PrecisionPolicy = DEFAULT_POLICY,
    max_iter: int = 10**6,
    max_magnitude: float = 1e30,
) -> ScanRecord:
    """Classify the orbit of c_n, tracking its correlation with the orbit of n."""
    try:
        outcome = classify_orbit(
            lambda bits: critical_point(n, bits).enclosure,
            policy,
            max_iter=max_iter,
            max_magnitude=max_magnitude,
            track=n,
        )
    except Exception as exc:  # one bad index never aborts a scan
        outcome = ClassificationOutcome(n, Outcome.UNRESOLVED.value, 0, 0, diagnostics=repr(exc))
    return ScanRecord(n, outcome)


def summarize(records: Iterable[ScanRecord]) -> dict:
    """Indices per label plus the not-proche indices."""
    by_label: dict[str, list[int]] = {}
    not_proche = []
    for r in sorted(records, key=lambda r: abs(r.n)):
        by_label.setdefault(r.label, []).append(r.n)
        if r.proche is False:
            not_proche.append(r.n)
    return {
        "counts": dict(Counter({k: len(v) for k, v in by_label.items()})),
        "indices": by_label,
        "not_proche": not_proche,
    }


def scan_critical(
    indices: Iterable[int],
    policy: PrecisionPolicy = DEFAULT_POLICY,
    workers: int = 1,
    skip: Iterable[int] = (),
    on_record: Callable[[ScanRecord], None] | None = None,
) -> tuple[list[ScanRecord], dict]:
    """Classify c_n for every index; records come back sorted by index.

    ``skip`` lists indices already done (resumed scans); ``on_record`` is
    called once per new record, in completion order.
    """
    done = set(skip)
    todo = [n for n in indices if n not in done]
    if any(n == 0 for n in todo):
        raise ValueError("index 0 has no critical point")
    records = []
    if workers > 1 and len(todo) > 1:
        from concurrent.futures import ProcessPoolExecutor, as_completed

        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(classify_critical, n, policy) for n in todo]
            for fut in as_completed(futures):
                rec = fut.result()
                records.append(rec)
                if on_record:
                    on_record(rec)
    else:
        for n in todo:
            rec = classify_critical(n, policy)
            records.append(rec)
            if on_record:
                on_record(rec)
    records.sort(key=lambda r: (abs(r.n), r.n))
    return records, summarize(records)
