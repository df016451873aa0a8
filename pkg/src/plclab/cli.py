"""Command line entry point: ``plclab run | compare | list-sources | describe-checker``."""

from __future__ import annotations

import argparse
import json
import sys

from . import experiments as ex
from .words import PRESETS


def _cmd_run(args) -> int:
    overrides = {"k": args.k, "bound": args.bound, "prefix_window": args.prefix_window}
    try:
        spec = ex.load_spec(args.spec, overrides)
    except (ex.SpecError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ex.EXIT_ERROR
    try:
        record = ex.run(spec)
    except ex.SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ex.EXIT_ERROR
    out = args.out or spec.output or "results"
    paths = ex.write_results(record, out)
    print(ex.summary(record))
    for p in paths:
        print(f"  wrote {p}")
    return record.exit_code()


def _cmd_compare(args) -> int:
    try:
        a = ex.load_record(args.a)
        b = ex.load_record(args.b)
    except ex.SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ex.EXIT_ERROR
    report = ex.compare(a, b)
    print(json.dumps(report, indent=2, sort_keys=True, default=str))
    return ex.EXIT_OK if report["identical"] else ex.EXIT_HYPOTHESIS


def _cmd_list_sources(args) -> int:
    print("kinds: periodic (period), morphic (morphism, seed, coding), sturmian (slope, intercept),")
    print("       concat (arity, program, seeds), explicit (word), preset (preset)")
    print("presets: " + ", ".join(sorted(PRESETS)))
    return ex.EXIT_OK


def _cmd_describe(args) -> int:
    if args.name not in ex.CHECKER_DOCS:
        print(f"error: unknown checker {args.name!r}; choose from {sorted(ex.CHECKER_DOCS)}", file=sys.stderr)
        return ex.EXIT_ERROR
    print(f"{args.name}: {ex.CHECKER_DOCS[args.name]}")
    return ex.EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="plclab", description="p-adic Littlewood experiments on words and points")
    sub = ap.add_subparsers(dest="cmd", required=True)
    r = sub.add_parser("run", help="run an experiment spec")
    r.add_argument("spec")
    r.add_argument("--out", help="output directory (default: spec 'output' or ./results)")
    r.add_argument("--k", help=f"override precision k (default {ex.DEFAULTS['k']})")
    r.add_argument("--bound", help=f"override PBad search bound B (default {ex.DEFAULTS['bound']})")
    r.add_argument("--prefix-window", help=f"override prefix window (default {ex.DEFAULTS['prefix_window']})")
    r.set_defaults(func=_cmd_run)
    c = sub.add_parser("compare", help="diff two result JSON files")
    c.add_argument("a")
    c.add_argument("b")
    c.set_defaults(func=_cmd_compare)
    ls = sub.add_parser("list-sources", help="list word-source kinds and presets")
    ls.set_defaults(func=_cmd_list_sources)
    d = sub.add_parser("describe-checker", help="describe a checker and its parameters")
    d.add_argument("name")
    d.set_defaults(func=_cmd_describe)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # last-resort: report and signal an error exit
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return ex.EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
