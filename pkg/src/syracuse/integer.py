"""Integer orbits of T (3x+1) and U (3x-1): flight times, range checks and the inverse tree."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import CapExceeded
from .maps import t_map, u_map

DEFAULT_CAP = 10**5
U_STOP = frozenset({1, 5, 17})


@dataclass(frozen=True)
class IntegerOrbit:
    start: int
    values: tuple
    terminated: bool

    @property
    def length(self) -> int:
        return len(self.values) - 1


def _orbit(n: int, step: Callable[[int], int], stop: frozenset, cap: int) -> IntegerOrbit:
    values = [n]
    x = n
    while x not in stop:
        if len(values) > cap:
            raise CapExceeded(f"orbit of {n} did not reach {sorted(stop)} in {cap} steps",
                              partial=IntegerOrbit(n, tuple(values), False))
        x = step(x)
        values.append(x)
    return IntegerOrbit(n, tuple(values), True)


def t_orbit(n: int, cap: int = DEFAULT_CAP) -> IntegerOrbit:
    """T-orbit of n up to its first visit to 1."""
    if n < 1:
        raise ValueError("n must be positive")
    return _orbit(n, t_map, frozenset({1}), cap)


def u_orbit(n: int, cap: int = DEFAULT_CAP) -> IntegerOrbit:
    """U-orbit of n up to its first visit to 1, 5 or 17."""
    if n < 1:
        raise ValueError("n must be positive")
    return _orbit(n, u_map, U_STOP, cap)


def flight_time(n: int, cap: int = DEFAULT_CAP) -> int:
    """Smallest k with T^k(n) = 1."""
    if n < 1:
        raise ValueError("n must be positive")
    k, x = 0, n
    while x != 1:
        if k >= cap:
            raise CapExceeded(f"flight time of {n} exceeds {cap}", partial=t_orbit_prefix(n, cap))
        x = (3 * x + 1) >> 1 if x & 1 else x >> 1
        k += 1
    return k


def t_orbit_prefix(n: int, k: int) -> IntegerOrbit:
    values = [n]
    for _ in range(k):
        values.append(t_map(values[-1]))
    return IntegerOrbit(n, tuple(values), values[-1] == 1)


def mean_speed(orbit: IntegerOrbit) -> float:
    """(T^k(n)/n)^(1/k) for an orbit of k >= 1 steps."""
    k = orbit.length
    if k < 1:
        raise ValueError("orbit needs at least one step")
    return math.exp((math.log(orbit.values[-1]) - math.log(orbit.start)) / k)


def predicted_flight_time(n: float) -> float:
    """Heuristic mean flight time 2 ln n / ln(4/3)."""
    return 2 * math.log(n) / math.log(4 / 3)


def flight_time_stats(ns: Iterable[int], cap: int = DEFAULT_CAP) -> dict:
    ns = list(ns)
    if not ns:
        raise ValueError("empty range")
    times = [flight_time(n, cap) for n in ns]
    # full-flight speed (1/n)^(1/k)
    speeds = [math.exp(-math.log(n) / t) if t else float("nan") for n, t in zip(ns, times)]
    finite = [s for s in speeds if not math.isnan(s)]
    total_steps = sum(times)
    pooled = math.exp(-sum(math.log(n) for n in ns) / total_steps) if total_steps else float("nan")
    return {
        "count": len(ns),
        "mean": total_steps / len(times),
        "predicted": predicted_flight_time(sum(ns) / len(ns)),
        # geometric mean of the per-step factor over all steps of all flights
        "mean_speed": pooled,
        "mean_speed_per_orbit": sum(finite) / len(finite) if finite else float("nan"),
        "sqrt3_over_2": math.sqrt(3) / 2,
        "times": times,
        "speeds": speeds,
    }


def flight_csv(ns: Sequence[int], stats: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "flight_time", "mean_speed"])
    for n, t, s in zip(ns, stats["times"], stats["speeds"]):
        w.writerow([n, t, "" if math.isnan(s) else f"{s:.12g}"])
    return buf.getvalue()


# -- range verification ------------------------------------------------------------


@dataclass
class RangeReport:
    verified_max: int
    worst_n: int
    worst_steps: int

    def as_json(self) -> dict:
        return {"verified_max": self.verified_max, "worst_n": self.worst_n, "worst_steps": self.worst_steps}


_INT64_GUARD = (2**63 - 1) // 3 - 1


def _verify_block(lo: int, hi: int, cap: int) -> tuple[int, int]:
    """Every n in [lo, hi) drops below itself; returns (worst n, its stopping time).

    All orbits of the block advance in lockstep as a numpy array.  Values
    that would overflow int64 are finished with Python integers.
    """
    start = np.arange(max(lo, 2), hi, dtype=np.int64)
    if start.size == 0:
        return 0, 0
    x = start.copy()
    steps = np.zeros(start.size, dtype=np.int64)
    idx = np.arange(start.size)
    k = 0
    while idx.size:
        if k >= cap:
            raise CapExceeded(f"stopping time of {int(start[idx[0]])} exceeds {cap}",
                              partial=t_orbit_prefix(int(start[idx[0]]), cap))
        xs = x[idx]
        big = xs > _INT64_GUARD
        if big.any():
            for j in idx[big]:
                steps[j] = k + _python_stopping(int(x[j]), int(start[j]), cap - k)
            idx = idx[~big]
            xs = xs[~big]
        odd = (xs & 1).astype(bool)
        xs = np.where(odd, (3 * xs + 1) >> 1, xs >> 1)
        x[idx] = xs
        k += 1
        done = xs < start[idx]
        steps[idx[done]] = k
        idx = idx[~done]
    j = int(np.argmax(steps))
    return int(start[j]), int(steps[j])


def _python_stopping(x: int, start: int, cap: int) -> int:
    k = 0
    while x >= start:
        if k >= cap:
            raise CapExceeded(f"stopping time of {start} exceeds cap", partial=t_orbit_prefix(start, cap))
        x = (3 * x + 1) >> 1 if x & 1 else x >> 1
        k += 1
    return k


def range_verify(N: int, block: int = 1 << 20, workers: int = 1, cap: int = DEFAULT_CAP) -> RangeReport:
    """Confirm every 1 <= n < N reaches 1.

    By induction on n it suffices that each n >= 2 eventually drops below
    itself.  Orbits are advanced in blocks; the reported worst case is the
    largest such stopping time.
    """
    if N < 2:
        raise ValueError("N must be at least 2")
    bounds = [(lo, min(lo + block, N)) for lo in range(2, N, block)]
    if workers > 1 and len(bounds) > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_verify_block, *zip(*bounds), [cap] * len(bounds)))
    else:
        results = [_verify_block(lo, hi, cap) for lo, hi in bounds]
    worst_n, worst = 1, 0
    for n, s in results:
        if s > worst:
            worst_n, worst = n, s
    return RangeReport(N - 1, worst_n, worst)


# -- inverse tree --------------------------------------------------------------------------


@dataclass
class InverseTree:
    """Integers reaching 1 under T within ``depth`` steps; parent = T(child)."""

    depth: int
    parent: dict = field(default_factory=dict)
    level: dict = field(default_factory=dict)

    @property
    def root(self) -> int:
        return 1

    def nodes(self) -> list[int]:
        return sorted(self.level)

    def children(self, m: int) -> list[int]:
        return sorted(c for c, p in self.parent.items() if p == m)

    def at_depth(self, d: int) -> list[int]:
        return sorted(n for n, k in self.level.items() if k == d)

    def as_json(self) -> str:
        rows = [{"node": n, "parent": self.parent.get(n), "depth": self.level[n]}
                for n in sorted(self.level, key=lambda v: (self.level[v], v))]
        return json.dumps(rows)

    def as_dot(self) -> str:
        lines = ["digraph inverse_tree {", "  rankdir=BT;"]
        for n in sorted(self.level, key=lambda v: (self.level[v], v)):
            lines.append(f'  "{n}";')
        for c, p in sorted(self.parent.items()):
            lines.append(f'  "{c}" -> "{p}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def preimages(m: int) -> list[int]:
    """T-preimages of m: 2m always, and (2m - 1)/3 when that is an odd integer > 1."""
    out = [2 * m]
    if m % 3 == 2:
        odd = (2 * m - 1) // 3
        if odd > 1:
            out.append(odd)
    return out


def inverse_tree(depth: int) -> InverseTree:
    if depth < 0:
        raise ValueError("depth must be non-negative")
    tree = InverseTree(depth, {}, {1: 0})
    frontier = [1]
    for d in range(1, depth + 1):
        nxt = []
        for m in frontier:
            for c in preimages(m):
                if c not in tree.level:
                    tree.level[c] = d
                    tree.parent[c] = m
                    nxt.append(c)
        frontier = nxt
    return tree
