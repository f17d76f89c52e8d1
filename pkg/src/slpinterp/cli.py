"""Command-line interface: ``interp``, ``gen``, ``bench`` and ``selftest``.

Exit codes: 0 success, 1 usage, 2 input parse error, 3 algorithm diagnostic
(bounds too small, or a failed self-test).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from .bench import TREND_FEATURES, fit_trend, probe_log, sweep, write_csv
from .multivariate import ALGOS, interpolate
from .oracle import InstanceSpec, random_instance
from .poly import format_poly
from .ring import Ring
from .selftest import FAULTS, run_selftest
from .slp import ProbeMeter, SlpParseError, format_slp, parse_slp
from .univariate import InterpolationError

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_ALGO = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _ring(text: str) -> Ring:
    try:
        return Ring.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _at_least(lo: int):
    def conv(text: str) -> int:
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
        if v < lo:
            raise argparse.ArgumentTypeError(f"must be >= {lo}")
        return v

    return conv


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="slpinterp", description="Deterministic sparse interpolation of straight-line programs.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log each interpolation round")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("interp", help="recover the polynomial computed by a circuit")
    p.add_argument("--circuit", required=True, help="circuit file ('-' for stdin)")
    p.add_argument("--nvars", type=_at_least(1), help="variable count (checked against the header)")
    p.add_argument("--degree-bound", type=_at_least(2), required=True, help="D, strictly above the total degree")
    p.add_argument("--term-bound", type=_at_least(1), required=True, help="T, at least the number of terms")
    p.add_argument("--ring", type=_ring, default=Ring(), help="'int' (default) or 'zmod:<q>'")
    p.add_argument("--algo", choices=ALGOS, default="mpolysi")
    p.add_argument("--out", help="output .poly file (default stdout)")

    p = sub.add_parser("gen", help="write a random instance as <out>.poly and <out>.slp")
    p.add_argument("--nvars", type=_at_least(1), required=True)
    p.add_argument("--degree-bound", type=_at_least(2), required=True)
    p.add_argument("--term-bound", type=_at_least(1), required=True)
    p.add_argument("--ring", type=_ring, default=Ring())
    p.add_argument("--seed", type=_at_least(0), default=0)
    p.add_argument("--coeff-range", type=_at_least(1), default=100)
    p.add_argument("--out", required=True, help="output path prefix")

    p = sub.add_parser("bench", help="time a sweep over T, D or n and write CSV")
    p.add_argument("--algo", choices=ALGOS, default="mpolysi")
    p.add_argument("--vary", choices=sorted(TREND_FEATURES), required=True)
    p.add_argument("--values", type=_int_list, required=True, help="sweep points, e.g. 8,16,24,32")
    p.add_argument("--nvars", type=_at_least(1), default=3)
    p.add_argument("--degree-bound", type=_at_least(2), default=2**12)
    p.add_argument("--term-bound", type=_at_least(1), default=16)
    p.add_argument("--reps", type=_at_least(1), default=1)
    p.add_argument("--ring", type=_ring, default=Ring())
    p.add_argument("--seed", type=_at_least(0), default=0)
    p.add_argument("--csv", help="CSV output path (default stdout)")
    p.add_argument("--probe-log", help="also write probe counts per point as JSON")

    p = sub.add_parser("selftest", help="run the invariant suite at small scale")
    p.add_argument("--scale", type=_at_least(1), default=3, help="multiplies the trial counts")
    p.add_argument("--inject-fault", choices=FAULTS, help=argparse.SUPPRESS)
    return ap


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_interp(args) -> int:
    try:
        text = sys.stdin.read() if args.circuit == "-" else Path(args.circuit).read_text()
    except OSError as exc:
        print(f"error: cannot read circuit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        prog = parse_slp(text, args.nvars)
    except SlpParseError as exc:
        print(f"parse error in {args.circuit}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    if args.algo == "uipoly" and prog.nvars != 1:
        print("error: uipoly needs a one-variable circuit", file=sys.stderr)
        return EXIT_USAGE
    meter = ProbeMeter()
    t0 = time.perf_counter()
    try:
        f = interpolate(args.algo, prog, args.degree_bound, args.term_bound, args.ring, meter)
    except InterpolationError as exc:
        print(f"interpolation failed: {exc}", file=sys.stderr)
        return EXIT_ALGO
    wall = time.perf_counter() - t0
    _write(format_poly(f), args.out)
    stats = meter.summary()
    print(f"algo={args.algo} terms={f.term_count} probes={stats['probes']} "
          f"max_probe_degree={stats['max_probe_degree']} ring_ops={stats['ring_ops']} wall_time={wall:.3f}s",
          file=sys.stderr)
    return EXIT_OK


def cmd_gen(args) -> int:
    spec = InstanceSpec(args.nvars, args.degree_bound, args.term_bound, args.ring, args.seed, args.coeff_range)
    f, prog = random_instance(spec)
    Path(f"{args.out}.poly").write_text(format_poly(f))
    Path(f"{args.out}.slp").write_text(format_slp(prog))
    print(f"wrote {args.out}.poly ({f.term_count} terms, total degree {f.total_degree()}) "
          f"and {args.out}.slp ({len(prog)} instructions)", file=sys.stderr)
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.algo == "uipoly" and (args.nvars != 1 or args.vary == "n"):
        print("error: uipoly benchmarks need --nvars 1 and cannot vary n", file=sys.stderr)
        return EXIT_USAGE
    records = sweep(args.algo, args.vary, args.values, args.nvars, args.degree_bound, args.term_bound,
                    args.reps, args.seed, args.ring)
    if args.csv and args.csv != "-":
        with open(args.csv, "w", newline="") as fh:
            write_csv(records, fh)
    else:
        write_csv(records, sys.stdout)
    if args.probe_log:
        Path(args.probe_log).write_text(json.dumps(probe_log(records), indent=1, sort_keys=True) + "\n")
    if len(set(args.values)) >= 2:
        print(fit_trend(records, args.vary).describe(), file=sys.stderr)
    return EXIT_OK


def cmd_selftest(args) -> int:
    t0 = time.perf_counter()
    results = run_selftest(args.inject_fault, args.scale)
    for r in results:
        print(r.line())
    failed = [r.name for r in results if not r.ok]
    print(f"{len(results) - len(failed)}/{len(results)} invariants hold ({time.perf_counter() - t0:.1f}s)")
    if failed:
        print("failed: " + ", ".join(failed))
        return EXIT_ALGO
    return EXIT_OK


COMMANDS = {"interp": cmd_interp, "gen": cmd_gen, "bench": cmd_bench, "selftest": cmd_selftest}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    return COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
