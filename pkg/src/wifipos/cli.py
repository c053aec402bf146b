"""``wifipos`` command line: simulate, build, locate, analyze, report, pipeline."""

from __future__ import annotations

import argparse
import os
import sys

from . import pipeline
from .analysis import load_report_summary, rank_techniques
from .errors import WifiPosError
from .locator import ApFilter, locate
from .queryio import iter_queries
from .radiomap import DEFAULT_FLOOR_DBM, GridSpec
from .stats import Technique
from .storage import load_map
from .synth import load_env

PROG = "wifipos"


def _technique(text):
    try:
        return Technique.parse(text)
    except WifiPosError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text):
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {n}")
    return n


def _add_filter_flags(p):
    p.add_argument("--rssi-min", type=float, help="drop APs heard weaker than this (dBm)")
    p.add_argument("--rssi-max", type=float, help="drop APs heard stronger than this (dBm)")
    p.add_argument("--include-aps", help="comma-separated AP ids to match on")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=PROG, description="Wi-Fi RSSI fingerprint positioning")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic survey CSV")
    p.add_argument("--env", required=True, help="environment TOML file")
    p.add_argument("--samples-per-point", type=_positive_int, required=True)
    p.add_argument("--out", required=True, help="survey CSV to write")
    p.add_argument("--queries-out", help="also write labeled queries here")
    p.add_argument("--queries-per-point", type=_positive_int)

    p = sub.add_parser("build", help="build the radio map and pre-computed summaries")
    p.add_argument("--scans", required=True, help="survey CSV")
    p.add_argument("--grid", required=True, help="grid dimensions, RxC")
    p.add_argument("--cell-m", type=float, required=True, help="cell size in meters")
    p.add_argument("--out", required=True, help="map file to write (.wfp)")
    p.add_argument("--floor-dbm", type=int, default=DEFAULT_FLOOR_DBM)

    p = sub.add_parser("locate", help="online mode: one estimate per query scan")
    p.add_argument("--map", required=True)
    p.add_argument("--query", required=True, help="query file, or - for stdin")
    p.add_argument("--technique", type=_technique, required=True)
    _add_filter_flags(p)

    p = sub.add_parser("analyze", help="offline mode: batch hit rates and errors")
    p.add_argument("--map", required=True)
    p.add_argument("--labeled", required=True, help="labeled query CSV")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    _add_filter_flags(p)

    p = sub.add_parser("report", help="rank techniques from an analysis report")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--top", type=_positive_int)

    p = sub.add_parser("pipeline", help="simulate, build and analyze in one go")
    p.add_argument("--env", required=True)
    p.add_argument("--workdir", required=True)
    p.add_argument("--samples-per-point", type=_positive_int, default=100)
    p.add_argument("--queries-per-point", type=_positive_int)
    p.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    return parser


def _same_path(a, b):
    return os.path.abspath(a) == os.path.abspath(b)


def _filter_from(args):
    if args.rssi_min is None and args.rssi_max is None and not args.include_aps:
        return None
    include = None
    if args.include_aps:
        include = frozenset(a.strip() for a in args.include_aps.split(",") if a.strip())
    return ApFilter(include, args.rssi_min, args.rssi_max)


def _cmd_simulate(args, out):
    env = load_env(args.env)
    pipeline.simulate(env, args.samples_per_point, args.out, args.queries_out, args.queries_per_point)


def _cmd_build(args, out):
    grid = GridSpec.parse(args.grid, args.cell_m)
    pipeline.build(args.scans, grid, args.out, args.floor_dbm)


def _cmd_locate(args, out):
    _, table = load_map(args.map)
    f = _filter_from(args)
    fh = sys.stdin if args.query == "-" else open(args.query, encoding="utf-8")
    try:
        out.write("row,col,distance\n")
        for q in iter_queries(fh, table.floor_dbm, args.query):
            est = locate(q, table, args.technique, f)
            out.write(f"{est.point.row},{est.point.col},{est.distance:.6f}\n")
            out.flush()
    finally:
        if fh is not sys.stdin:
            fh.close()


def _cmd_analyze(args, out):
    pipeline.analyze_files(args.map, args.labeled, args.out, args.format, _filter_from(args))


def _cmd_report(args, out):
    ranked = rank_techniques(load_report_summary(args.input), args.top)
    out.write("rank,technique,hit_rate,hit_pct,p95_error_m\n")
    for i, row in enumerate(ranked, start=1):
        p95 = "" if row["p95_error_m"] is None else repr(row["p95_error_m"])
        out.write(f"{i},{row['technique']},{row['hit_rate']!r},{round(row['hit_rate'])},{p95}\n")


def _cmd_pipeline(args, out):
    paths = pipeline.run_pipeline(args.env, args.workdir, args.samples_per_point, args.queries_per_point, args.format)
    for name, path in paths.items():
        out.write(f"{name},{path}\n")


COMMANDS = {
    "simulate": _cmd_simulate,
    "build": _cmd_build,
    "locate": _cmd_locate,
    "analyze": _cmd_analyze,
    "report": _cmd_report,
    "pipeline": _cmd_pipeline,
}

_IO_PAIRS = {
    "simulate": [("env", "out"), ("env", "queries_out"), ("out", "queries_out")],
    "build": [("scans", "out")],
    "analyze": [("map", "out"), ("labeled", "out")],
}


def main(argv=None, out=None) -> int:
    """Entry point; returns the exit status (0 ok, 1 runtime error, 2 usage)."""
    out = sys.stdout if out is None else out
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    for a, b in _IO_PAIRS.get(args.command, ()):
        va, vb = getattr(args, a), getattr(args, b)
        if va is not None and vb is not None and _same_path(va, vb):
            print(
                f"{PROG} {args.command}: error: --{a.replace('_', '-')} and "
                f"--{b.replace('_', '-')} must be different paths",
                file=sys.stderr,
            )
            return 2
    try:
        COMMANDS[args.command](args, out)
    except WifiPosError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        where = f": {exc.filename}" if exc.filename else ""
        print(f"{PROG}: error: {exc.strerror or exc}{where}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
