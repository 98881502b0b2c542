"""Command line front end.

Subcommands: ``gen`` streams raw bytes (suitable for piping into PractRand
or dieharder), ``bench`` times the comparison workloads, ``search`` runs
the active-function bound search, ``selftest`` runs the built-in health
checks.  Exit codes: 0 success, 1 failed checks or I/O trouble, 2 usage.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from randen import aes
from randen.generator import RandenEngine
from randen.keys import BUILTIN_SOURCE, derive_round_keys

_CHUNK = 1 << 20


def _parse_seed(text: str):
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("seed needs four comma-separated words")
    try:
        values = tuple(int(p.strip(), 0) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad seed word: {exc}")
    for v in values:
        if not 0 <= v < 1 << 64:
            raise argparse.ArgumentTypeError("seed words must fit in 64 bits")
    return values


def _parse_bytes(text: str):
    if text == "infinite":
        return None
    try:
        n = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError("expected a byte count or 'infinite'")
    if n < 0:
        raise argparse.ArgumentTypeError("byte count must be >= 0")
    return n


def _add_common_engine_args(parser):
    parser.add_argument("--seed", type=_parse_seed, default=(0, 0, 0, 0),
                        help="four 64-bit words, comma separated, 0x-hex or decimal")
    parser.add_argument("--keys", default=BUILTIN_SOURCE, metavar="SOURCE",
                        help="'builtin-pi' or a path to 2176 bytes of key material")
    parser.add_argument("--backend", choices=("aesni", "table", "python"),
                        default=None, help="AES backend (default: best available)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="randen", description="AES-round Feistel generator toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="stream raw generator output")
    _add_common_engine_args(gen)
    gen.add_argument("--bytes", type=_parse_bytes, default=None, dest="nbytes",
                     help="byte count or 'infinite' (default)")
    gen.add_argument("--out", default=None, help="output file (default stdout)")

    bench = sub.add_parser("bench", help="time the comparison workloads")
    bench.add_argument("--kind", default="all",
                       help="loop, shuffle, sample, montecarlo or all")
    bench.add_argument("--engine", default="all",
                       help="randen, randen-sw, mt19937_64, splitmix64 or all")
    bench.add_argument("--reps", type=int, default=20,
                       help="repetitions per measurement (min 5)")
    bench.add_argument("--seed", type=_parse_seed, default=(1, 2, 3, 4))
    bench.add_argument("--json", action="store_true", help="emit JSON rows")
    bench.add_argument("--tsc-freq", type=float, default=None, metavar="HZ",
                       help="convert ns results to cycles at this frequency")
    bench.add_argument("--report-dir", default=None,
                       help="write CSV and figures into this directory")

    search_p = sub.add_parser("search", help="active round-function bounds")
    search_p.add_argument("--rounds", type=int, default=14)
    search_p.add_argument("--mode", choices=("fast", "exact"), default="exact")
    search_p.add_argument("--workers", type=int, default=1)
    search_p.add_argument("--table", action="store_true",
                          help="emit bounds for all rounds up to --rounds")
    search_p.add_argument("--json", action="store_true")
    search_p.add_argument("--report-dir", default=None,
                          help="write CSV and figure (implies --table)")

    selftest = sub.add_parser("selftest", help="run built-in health checks")
    selftest.add_argument("--samples", type=int, default=10000,
                          help="backend agreement sample count")
    selftest.add_argument("--smoke-bytes", type=int, default=None,
                          help="statistical smoke stream size")
    return parser


def _cmd_gen(args) -> int:
    try:
        schedule = derive_round_keys(args.keys)
    except (OSError, ValueError) as exc:
        print(f"randen: cannot load keys: {exc}", file=sys.stderr)
        return 1
    try:
        engine = RandenEngine(args.seed, key_schedule=schedule, backend=args.backend)
    except aes.BackendUnavailableError as exc:
        print(f"randen: {exc}", file=sys.stderr)
        return 1
    try:
        out = open(args.out, "wb") if args.out else sys.stdout.buffer
    except OSError as exc:
        print(f"randen: cannot open output: {exc}", file=sys.stderr)
        return 1
    remaining = args.nbytes
    try:
        while remaining is None or remaining > 0:
            take = _CHUNK if remaining is None else min(_CHUNK, remaining)
            if take == 0:
                break
            out.write(engine.fill_bytes(take))
            if remaining is not None:
                remaining -= take
        out.flush()
    except BrokenPipeError:
        # the consumer finished; avoid a second error when stdout flushes
        # again at interpreter shutdown
        try:
            os.dup2(os.open(os.devnull, os.O_WRONLY), out.fileno())
        except OSError:
            pass
        return 0
    except OSError as exc:
        print(f"randen: write failed: {exc}", file=sys.stderr)
        return 1
    finally:
        if args.out:
            out.close()
    return 0


def _split_choice(value: str, allowed) -> list:
    if value == "all":
        return list(allowed)
    chosen = [v.strip() for v in value.split(",")]
    for v in chosen:
        if v not in allowed:
            raise ValueError(f"unknown name {v!r}; choose from {', '.join(allowed)}")
    return chosen


def _cmd_bench(args) -> int:
    from randen import bench

    try:
        kinds = _split_choice(args.kind, bench.WORKLOAD_NAMES)
        engines = _split_choice(args.engine, bench.ENGINE_NAMES)
        rows = bench.run_suite(kinds, engines, repetitions=args.reps, seed=args.seed)
    except (ValueError, aes.BackendUnavailableError, bench.MonotonicityError) as exc:
        print(f"randen: bench failed: {exc}", file=sys.stderr)
        return 1
    if args.tsc_freq:
        rows = [bench.to_cycles(r, args.tsc_freq) for r in rows]
    if args.json:
        print(json.dumps([r.to_dict() for r in rows], indent=2))
    else:
        print(bench.format_rows(rows))
    if args.report_dir:
        from randen import report

        for path in report.bench_report(rows, args.report_dir):
            print(f"wrote {path}", file=sys.stderr)
    return 0


def _cmd_search(args) -> int:
    from randen import report, search

    want_table = args.table or args.report_dir
    try:
        if want_table:
            rows = search.emit_bound_table(args.rounds, worker_count=args.workers)
        elif args.mode == "fast":
            bound = search.fast_min_active(args.rounds)
        else:
            bound = search.exact_min_active(args.rounds, worker_count=args.workers)
    except ValueError as exc:
        print(f"randen: search failed: {exc}", file=sys.stderr)
        return 1
    if want_table:
        if args.json:
            print(json.dumps([row.__dict__ for row in rows], indent=2))
        else:
            print(search.format_bound_table(rows))
        if args.report_dir:
            for path in report.bounds_report(rows, args.report_dir):
                print(f"wrote {path}", file=sys.stderr)
        if not all(row.ok for row in rows):
            print("randen: bound table deviates from reference values",
                  file=sys.stderr)
            return 1
        return 0
    if args.json:
        print(json.dumps({"rounds": args.rounds, "mode": args.mode,
                          "bound": bound}))
    else:
        print(bound)
    return 0


def _cmd_selftest(args) -> int:
    from randen import selftest

    kwargs = {"samples": args.samples}
    if args.smoke_bytes is not None:
        kwargs["smoke_bytes"] = args.smoke_bytes
    results, ok = selftest.run_selftest(**kwargs)
    for check in results:
        status = "PASS" if check.ok else "FAIL"
        detail = f" - {check.detail}" if check.detail else ""
        print(f"{status} {check.name}{detail}")
    if not ok:
        failed = ", ".join(c.name for c in results if not c.ok)
        print(f"randen: selftest failed: {failed}", file=sys.stderr)
        return 1
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "bench": _cmd_bench,
    "search": _cmd_search,
    "selftest": _cmd_selftest,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return _COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
