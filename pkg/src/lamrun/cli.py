"""Command line interface: parse, run, compare, types, check, bench."""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import equivalence as eq, harness, multitypes as mt
from .reporting import FuelExhausted, StuckError
from .syntax import (
    DEFAULT_FUEL,
    Diverged,
    LamError,
    is_closed,
    load_definitions,
    parse,
    parse_path,
    pretty,
    pretty_with_hole,
    term_size,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_FUEL = 2
EXIT_INPUT = 3


def _read_term_arg(text: str, defs_path):
    if text.startswith("@"):
        with open(text[1:], "r", encoding="utf-8") as fh:
            text = fh.read()
    definitions = {}
    if defs_path:
        with open(defs_path, "r", encoding="utf-8") as fh:
            definitions = load_definitions(fh.read())
    return parse(text, definitions)


def _default_fuel(args) -> int:
    if args.fuel is not None:
        return args.fuel
    env = os.environ.get("LAMRUN_FUEL")
    return int(env) if env else DEFAULT_FUEL


def _table(events, root) -> str:
    headers = ["step", "label", "dir", "subterm", "context", "token"]
    rows = []
    for ev in events:
        rows.append([
            str(ev.step),
            ev.label,
            ev.dir,
            ev.subterm_pretty,
            pretty_with_hole(root, parse_path(ev.subterm_path)),
            json.dumps(ev.token, ensure_ascii=False),
        ])
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
              for i, h in enumerate(headers)]
    out = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(headers))]
    for r in rows:
        out.append("  ".join(r[i].ljust(widths[i]) for i in range(len(headers))))
    return "\n".join(out)


def cmd_parse(args) -> int:
    term = _read_term_arg(args.term, args.defs)
    print(pretty(term))
    print(f"size: {term_size(term)}")
    print(f"closed: {is_closed(term)}")
    return EXIT_OK


def cmd_run(args) -> int:
    term = _read_term_arg(args.term, args.defs)
    fuel = _default_fuel(args)
    trace = args.trace != "none"
    try:
        report = harness.run_machine(args.machine, term, fuel, trace=trace)
    except (FuelExhausted, Diverged):
        print(f"fuel exhausted after {fuel} steps", file=sys.stderr)
        return EXIT_FUEL
    sink = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        if args.trace == "table":
            print(_table(report.events, term), file=sink)
        elif args.trace == "jsonl":
            for ev in report.events:
                print(json.dumps(ev.to_json(), ensure_ascii=False), file=sink)
        print(json.dumps(report.to_json(), ensure_ascii=False), file=sink)
    finally:
        if args.out:
            sink.close()
    return EXIT_OK


def cmd_compare(args) -> int:
    term = _read_term_arg(args.term, args.defs)
    fuel = _default_fuel(args)
    machines = args.machines.split(",") if args.machines else None
    row = harness.compare(term, fuel, machines, with_types=args.types)
    if args.format == "json":
        print(json.dumps(row, ensure_ascii=False, indent=2))
        return EXIT_OK
    entries = row["machines"]
    headers = ["machine", "outcome", "length", "vars", "ramBound", "peakLp", "peakMarkers"]
    lines = ["\t".join(headers) if args.format == "csv" else "  ".join(headers)]
    sep = "\t" if args.format == "csv" else "  "
    for name, entry in entries.items():
        per = entry.get("perLabel", {})
        vars_count = per.get("var", 0) + per.get("var_j", 0) + per.get("var_k", 0)
        peak = entry.get("peakFootprint", {})
        lines.append(sep.join(str(x) for x in [
            name, entry.get("outcome"), entry.get("length"), vars_count,
            entry.get("ramCostBound"), peak.get("lp"), peak.get("markers")]))
    if "weights" in row and row["weights"]:
        lines.append(f"weights{sep}w_kam={row['weights']['w_kam']}"
                     f"{sep}w_iam={row['weights']['w_iam']}")
    print("\n".join(lines))
    return EXIT_OK


def cmd_types(args) -> int:
    term = _read_term_arg(args.term, args.defs)
    fuel = _default_fuel(args)
    try:
        deriv = mt.infer_star_derivation(term, fuel)
    except Diverged:
        print("no weak head normal form within fuel; term is untypable", file=sys.stderr)
        return EXIT_FUEL
    print(f"type: {mt.type_str(deriv.rh_type)}")
    if args.weights:
        print(f"w_kam: {mt.weight_kam(deriv)}")
        print(f"w_iam: {mt.weight_iam(deriv)}")
        print(f"stars: {mt.star_count(deriv)}")
    if args.print_derivation:
        print(mt.derivation_pretty(deriv, term))
    if args.json:
        print(json.dumps(mt.derivation_to_json(deriv), ensure_ascii=False))
    return EXIT_OK


def cmd_check(args) -> int:
    fuel = _default_fuel(args)
    if args.corpus:
        seed, count, max_size = (int(x) for x in args.corpus.split(","))
        terms = harness.gen_corpus(seed, count, max_size)
    elif args.term:
        terms = [_read_term_arg(args.term, args.defs)]
    else:
        print("a term or --corpus is required", file=sys.stderr)
        return EXIT_INPUT
    checkers = {
        "iam-jam": eq.check_iam_jam,
        "jam-pam": eq.check_jam_pam,
        "ham-jk": eq.check_ham_jk,
        "weights": eq.check_weights,
        "invariants": eq.check_invariants_suite,
    }
    if args.what == "quadratic":
        report = eq.check_quadratic_bound(terms, fuel)
        print(json.dumps(report.to_json(), ensure_ascii=False))
        return EXIT_OK if report.passed else EXIT_CHECK_FAILED
    checker = checkers[args.what]
    failures = inconclusive = 0
    for term in terms:
        report = checker(term, fuel)
        print(json.dumps(report.to_json(), ensure_ascii=False))
        failures += not report.passed
        inconclusive += report.inconclusive
    if failures:
        return EXIT_CHECK_FAILED
    return EXIT_FUEL if inconclusive else EXIT_OK


def cmd_bench(args) -> int:
    fuel = _default_fuel(args)
    lo, hi = (int(x) for x in args.range.split(".."))
    rows = []
    for n in range(lo, hi + 1):
        if args.family == "tn":
            term = harness.family_tn(n)
            label = f"t_{n}"
        else:
            term = harness.family_rkh(n, n)
            label = f"r_{n}^{n}"
        row = harness.compare(term, fuel)
        rows.append((label, row))
    if args.format == "csv":
        print("family,machine,length,vars,peakLp,peakMarkers")
        for label, row in rows:
            for name, entry in row["machines"].items():
                per = entry.get("perLabel", {})
                peak = entry.get("peakFootprint", {})
                print(f"{label},{name},{entry.get('length')},{per.get('var', 0)},"
                      f"{peak.get('lp')},{peak.get('markers')}")
    else:
        for label, row in rows:
            lengths = {name: entry.get("length") for name, entry in row["machines"].items()}
            print(label, json.dumps(lengths))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lamrun")
    sub = p.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("parse", help="echo parsed term, size, closedness")
    sp.add_argument("term")
    sp.add_argument("--defs")
    sp.set_defaults(fn=cmd_parse)

    sp = sub.add_parser("run", help="run one machine, optionally tracing")
    sp.add_argument("term")
    sp.add_argument("--machine", required=True,
                    choices=["iam", "jam", "pam", "kam", "ham-j", "ham-k", "siam"])
    sp.add_argument("--fuel", type=int)
    sp.add_argument("--trace", choices=["table", "jsonl", "none"], default="none")
    sp.add_argument("--out")
    sp.add_argument("--defs")
    sp.set_defaults(fn=cmd_run)

    sp = sub.add_parser("compare", help="run several machines on one term")
    sp.add_argument("term")
    sp.add_argument("--machines")
    sp.add_argument("--fuel", type=int)
    sp.add_argument("--format", choices=["table", "csv", "json"], default="table")
    sp.add_argument("--types", action="store_true")
    sp.add_argument("--defs")
    sp.set_defaults(fn=cmd_compare)

    sp = sub.add_parser("types", help="build the star derivation and weights")
    sp.add_argument("term")
    sp.add_argument("--print-derivation", action="store_true")
    sp.add_argument("--weights", action="store_true")
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--fuel", type=int)
    sp.add_argument("--defs")
    sp.set_defaults(fn=cmd_types)

    sp = sub.add_parser("check", help="machine relationship and invariant checkers")
    sp.add_argument("what", choices=["iam-jam", "jam-pam", "ham-jk", "weights",
                                     "quadratic", "invariants"])
    sp.add_argument("term", nargs="?")
    sp.add_argument("--corpus", help="seed,count,maxSize")
    sp.add_argument("--fuel", type=int)
    sp.add_argument("--defs")
    sp.set_defaults(fn=cmd_check)

    sp = sub.add_parser("bench", help="run a benchmark family")
    sp.add_argument("--family", required=True, choices=["tn", "rkh"])
    sp.add_argument("--range", required=True, help="a..b")
    sp.add_argument("--format", choices=["csv", "table"], default="table")
    sp.add_argument("--fuel", type=int)
    sp.set_defaults(fn=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (FuelExhausted, Diverged) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_FUEL
    except (LamError, OSError, ValueError) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INPUT
    except StuckError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
