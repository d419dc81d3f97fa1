"""Command-line workbench: ``python -m syracuse <subcommand>``.

Exit status is 0 on success, 2 on usage errors (argparse) and 1 on
computational failures, which also print a JSON error report on stderr.
``verify --strict`` and ``paperlists --strict`` exit 1 when a verdict is not
certified or a list differs.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .errors import SyracuseError

log = logging.getLogger("syracuse")


class ComputationFailed(SyracuseError):
    """A subcommand finished but its result is a failure (strict modes)."""


# -- helpers ---------------------------------------------------------------------------


def _policy(args):
    from .kernel import PrecisionPolicy

    return PrecisionPolicy(start_bits=args.start_bits, max_bits=args.max_bits)


def _run_config(args) -> dict:
    skip = {"func", "out", "json_out", "csv", "cache", "workers", "force", "verbose"}
    cfg = {k: (str(v) if isinstance(v, Fraction) else v) for k, v in vars(args).items() if k not in skip}
    cfg["version"] = __version__
    return cfg


def _emit(args, payload: Any) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, default=str)
    out = getattr(args, "json_out", None)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    print(text)


def _parse_start(text: str):
    """Integer, fraction ``p/q`` or decimal string."""
    try:
        return int(text)
    except ValueError:
        pass
    if "/" in text:
        return Fraction(text)
    float(text)  # validate
    return text


def _workers(args) -> int:
    return args.workers if args.workers else (os.cpu_count() or 1)


# -- subcommands -------------------------------------------------------------------------


def cmd_orbit(args) -> int:
    from .kernel import Ball
    from .maps import f_ext, u_map

    start = _parse_start(args.start)
    if isinstance(start, int):
        step = u_map if args.u else f_ext
        values = [start]
        for _ in range(args.steps):
            values.append(step(values[-1]))
        print(" ".join(str(v) for v in values))
        return 0
    if args.u:
        raise SyracuseError("--u applies to integer starts only")
    x = Ball.exact(start, args.bits)
    print(f"0 {x.mid:.{args.digits}g} +/- {float(x.rad):.2e}")
    for k in range(1, args.steps + 1):
        x = f_ext(x)
        print(f"{k} {x.mid:.{args.digits}g} +/- {float(x.rad):.2e}")
    return 0


def cmd_flight(args) -> int:
    from . import integer

    payload: dict = {"config": _run_config(args)}
    if args.range_verify:
        payload["range_verify"] = integer.range_verify(args.range_verify, workers=_workers(args)).as_json()
    ns = list(range(args.lo, args.hi + 1))
    if ns:
        st = integer.flight_time_stats(ns, cap=args.cap)
        if args.csv:
            Path(args.csv).write_text(integer.flight_csv(ns, st), encoding="utf-8")
        payload["stats"] = {k: v for k, v in st.items() if k not in ("times", "speeds")}
    _emit(args, payload)
    return 0


def cmd_tree(args) -> int:
    from .integer import inverse_tree

    tree = inverse_tree(args.depth)
    text = tree.as_dot() if args.format == "dot" else tree.as_json() + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_critical(args) -> int:
    from .critical import critical_csv, critical_table

    idx = [n for n in range(args.lo, args.hi + 1) if n != 0]
    text = critical_csv(critical_table(idx, args.bits), args.digits)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _scan_indices(side: str, n_max: int) -> list[int]:
    return list(range(1, n_max + 1)) if side == "positive" else list(range(-1, -n_max - 1, -1))


def run_scan(args) -> tuple[list[dict], dict]:
    """Scan with optional JSONL persistence; returns sorted records and a summary."""
    from .attractors import scan_critical
    from .cache import ScanCache, default_cache_dir

    indices = _scan_indices(args.side, args.max)
    cache = None
    if not args.no_cache:
        path = Path(args.cache) if args.cache else default_cache_dir() / f"scan-{args.side}-{args.max}.jsonl"
        cfg = {"side": args.side, "start_bits": args.start_bits, "max_bits": args.max_bits,
               "max_iter": args.max_iter, "version": __version__}
        cache = ScanCache(path, cfg, force=args.force)
    done = cache.done() if cache is not None else set()
    records, _ = scan_critical(
        indices,
        _policy(args),
        workers=_workers(args),
        skip=done,
        on_record=(lambda r: cache.append(r.as_json())) if cache is not None else None,
    )
    rows = {r["n"]: r for r in (cache if cache is not None else [])}
    rows.update({r.n: r.as_json() for r in records})
    ordered = [rows[n] for n in indices if n in rows]
    by_label: dict[str, list[int]] = {}
    for r in ordered:
        by_label.setdefault(r["label"], []).append(r["n"])
    summary = {
        "counts": {k: len(v) for k, v in sorted(by_label.items())},
        "indices": {k: v for k, v in sorted(by_label.items()) if k not in ("A1",)},
        "not_proche": [r["n"] for r in ordered if r["proche"] is False],
        "max_bits_used": max((r["bits"] for r in ordered), default=0),
    }
    return ordered, summary


def cmd_scan(args) -> int:
    _, summary = run_scan(args)
    _emit(args, {"config": _run_config(args), "summary": summary})
    return 0


def cmd_verify(args) -> int:
    from . import rigor

    certs = rigor.run_suite(n_max=args.n_max, bits=args.bits)
    payload = {"config": _run_config(args), "certificates": [c.as_json() for c in certs]}
    _emit(args, payload)
    if args.strict and not all(c.certified for c in certs):
        raise ComputationFailed("not every verification claim was certified")
    return 0


def cmd_stats(args) -> int:
    import mpmath

    from . import stats

    payload: dict = {"config": _run_config(args)}
    if args.what == "tau":
        t = stats.tau_constant(args.bits)
        payload.update(tau=f"{t.tau.mid:.30g}", quadrature=mpmath.nstr(t.quadrature, 30), nodes=t.nodes,
                       agreement=t.agreement, ln_tau=f"{t.ln_tau.mid:.20g}")
    elif args.what == "crandall":
        payload.update(k=args.k, product=stats.crandall_product(args.k))
    elif args.what == "discrepancy":
        pts = [float(v) for v in args.points]
        payload.update(discrepancy=stats.star_discrepancy(pts, args.a, args.b))
    else:
        starts = stats.random_starts(args.count, args.lo, args.hi, args.seed)
        res = stats.growth_experiment(starts, args.steps, _policy(args), args.ud_threshold)
        if args.csv:
            Path(args.csv).write_text(stats.growth_csv(res["rows"]), encoding="utf-8")
        payload["summary"] = res["summary"]
    _emit(args, payload)
    return 0


def table1_rows(bits: int = 128) -> dict:
    from .attractors import attractor, cycle_multiplier
    from .maps import f_ext
    from .published import REPELLING_INTEGER_CYCLES, TABLE1

    rows = []
    for label, period, printed in TABLE1:
        a = attractor(label, bits)
        m = a.multiplier
        value = float(m) if isinstance(m, Fraction) else float(m.mid)
        rows.append({
            "label": label,
            "period": a.period,
            "multiplier": f"{value:.9f}",
            "published": printed,
            "match_1e-6": abs(value - float(printed)) <= 1e-6,
        })
    repelling = []
    for start, expected in REPELLING_INTEGER_CYCLES:
        cyc = [start]
        while f_ext(cyc[-1]) != start:
            cyc.append(f_ext(cyc[-1]))
        m = cycle_multiplier(cyc, exact_rational=True)
        repelling.append({"cycle": cyc, "multiplier": str(m), "published": str(expected), "match": m == expected})
    return {"attracting": rows, "repelling_integer_cycles": repelling}


def cmd_table1(args) -> int:
    result = table1_rows(args.bits)
    for r in result["attracting"]:
        print(f"{r['label']:>5}  {r['period']:>3}  {r['multiplier']}  (published {r['published']})")
    for r in result["repelling_integer_cycles"]:
        print(f"cycle through {r['cycle'][0]}: multiplier {r['multiplier']} (published {r['published']})")
    if args.json_out:
        Path(args.json_out).write_text(json.dumps(result, indent=2) + "\n", encoding="utf-8")
    return 0


def cmd_paperlists(args) -> int:
    from . import published as P

    _, summary = run_scan(args)
    idx = summary["indices"]
    diffs: dict = {}
    if args.side == "positive":
        computed = set(idx.get("A2", []))
        expected = {n for n in P.A2_INDICES if n <= args.max}
        diffs["A2_missing"] = sorted(expected - computed)
        diffs["A2_extra"] = sorted(computed - expected)
        others = {k: v for k, v in idx.items() if k not in ("A2",)}
        diffs["other_labels"] = others
        proche_window = [n for n in summary["not_proche"] if n <= max(P.NOT_PROCHE_PREFIX) and n % 64 != 62]
        info = {"not_proche_excluding_62_mod_64": proche_window,
                "not_proche_published_prefix": list(P.NOT_PROCHE_PREFIX)}
        ok = not diffs["A2_missing"] and not diffs["A2_extra"] and not others
    else:
        labels = {n: lbl for lbl, ns in idx.items() for n in ns}
        rule_breaks = []
        for n in range(-1, -args.max - 1, -1):
            lbl = labels.get(n, "missing")
            if lbl != P.negative_rule(n):
                rule_breaks.append((n, lbl))
        expected = [(n, l) for n, l in P.NEGATIVE_EXCEPTIONS if n > -args.max]
        computed_prefix = [(n, l) for n, l in rule_breaks if n >= min(n for n, _ in P.NEGATIVE_EXCEPTIONS)]
        diffs["exceptions_missing"] = [e for e in expected if e not in computed_prefix]
        diffs["exceptions_extra"] = [e for e in computed_prefix if e not in expected]
        diffs["odd_rule_breaks"] = [e for e in rule_breaks if e[0] % 2]
        info = {"all_exceptions": rule_breaks, "decorrelated": summary["not_proche"]}
        ok = not any(diffs[k] for k in ("exceptions_missing", "exceptions_extra", "odd_rule_breaks"))
    _emit(args, {"config": _run_config(args), "diffs": diffs, "info": info, "zero_diffs": ok})
    if args.strict and not ok:
        raise ComputationFailed("computed lists differ from the published lists")
    return 0


# -- parser ------------------------------------------------------------------------------------


def _add_policy(p):
    p.add_argument("--start-bits", type=int, default=128, help="initial working precision")
    p.add_argument("--max-bits", type=int, default=32768, help="precision escalation ceiling")


def _add_scan(p):
    p.add_argument("--side", choices=("positive", "negative"), default="positive")
    p.add_argument("--max", type=int, default=2000, help="scan 1..max (or -1..-max)")
    p.add_argument("--max-iter", type=int, default=10**6)
    p.add_argument("--workers", type=int, default=0, help="parallel workers (0 = all cores)")
    p.add_argument("--cache", help="JSONL cache file (default under $SYRACUSE_CACHE_DIR)")
    p.add_argument("--no-cache", action="store_true")
    p.add_argument("--force", action="store_true", help="overwrite a cache written with another config")
    _add_policy(p)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="syracuse", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("orbit", help="print a trajectory of f (or U)")
    p.add_argument("--start", required=True)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--bits", type=int, default=128)
    p.add_argument("--digits", type=int, default=20)
    p.add_argument("--u", action="store_true", help="iterate the 3x-1 map U on integers")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("flight", help="flight-time statistics over [lo, hi]")
    p.add_argument("--lo", type=int, default=1)
    p.add_argument("--hi", type=int, default=1000)
    p.add_argument("--cap", type=int, default=10**5)
    p.add_argument("--range-verify", type=int, metavar="N", help="also check every n < N reaches 1")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--csv")
    p.add_argument("--json-out")
    p.set_defaults(func=cmd_flight)

    p = sub.add_parser("tree", help="inverse tree of 1")
    p.add_argument("--depth", type=int, default=7)
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_tree)

    p = sub.add_parser("critical", help="CSV table of critical points c_n")
    p.add_argument("--lo", type=int, default=1)
    p.add_argument("--hi", type=int, default=20)
    p.add_argument("--bits", type=int, default=128)
    p.add_argument("--digits", type=int, default=30)
    p.add_argument("--out")
    p.set_defaults(func=cmd_critical)

    p = sub.add_parser("scan", help="classify the orbits of c_n (resumable)")
    _add_scan(p)
    p.add_argument("--json-out")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("verify", help="interval-arithmetic verification suites")
    p.add_argument("--n-max", type=int, default=10**4)
    p.add_argument("--bits", type=int, default=128)
    p.add_argument("--strict", action="store_true", help="exit 1 unless every verdict is certified")
    p.add_argument("--json-out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("stats", help="tau, Crandall's product, discrepancy, growth experiments")
    p.add_argument("what", choices=("tau", "crandall", "discrepancy", "growth"))
    p.add_argument("--bits", type=int, default=128)
    p.add_argument("--k", type=int, default=30)
    p.add_argument("--points", nargs="*", default=[])
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--lo", type=float, default=1e3)
    p.add_argument("--hi", type=float, default=1e4)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ud-threshold", type=float, default=0.05)
    p.add_argument("--csv")
    p.add_argument("--json-out")
    _add_policy(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("table1", help="multipliers of the attracting cycles on the negative side")
    p.add_argument("--bits", type=int, default=128)
    p.add_argument("--json-out")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("paperlists", help="diff scan results against the published lists")
    _add_scan(p)
    p.add_argument("--strict", action="store_true")
    p.add_argument("--json-out")
    p.set_defaults(func=cmd_paperlists)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (SyracuseError, ArithmeticError, ValueError, OSError) as exc:
        report = {"error": type(exc).__name__, "message": str(exc), "command": args.command}
        print(json.dumps(report), file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
