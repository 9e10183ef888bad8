"""Command line interface: count, bench, selftest, kernels.

Exit status: 0 success, 1 runtime failure (including selftest
mismatches), 2 usage or input errors.
"""

import argparse
import sys

from .bench import (
    BASELINE,
    BenchConfig,
    csv_header,
    default_size_grid,
    run_benchmark,
)
from .core import (
    InputLengthError,
    KernelUnavailableError,
    UnknownKernelError,
    WORD_WIDTHS,
)
from .kernels import list_kernels, pospopcnt
from .selftest import run_selftest


def _parse_size(text):
    suffixes = {"k": 1 << 10, "m": 1 << 20, "g": 1 << 30}
    t = text.strip().lower()
    mult = 1
    if t and t[-1] in suffixes:
        mult = suffixes[t[-1]]
        t = t[:-1]
    try:
        return int(t) * mult
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size {text!r}")


def _size_list(text):
    return tuple(_parse_size(part) for part in text.split(",") if part)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pospopcnt",
        description="Positional population counts: per-bit-position set-bit "
        "counters over arrays of 8/16/32/64-bit words.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="count a file (or stdin)")
    p.add_argument("--width", type=int, choices=WORD_WIDTHS, default=8)
    p.add_argument("--kernel", default=None, help="kernel name (default: auto)")
    p.add_argument("--format", choices=("lines", "csv"), default="lines")
    p.add_argument("file", nargs="?", help="input file (default: stdin)")

    p = sub.add_parser("bench", help="run the throughput benchmark")
    p.add_argument("--sizes", type=_size_list, default=None,
                   help="comma-separated byte sizes (k/M/G suffixes ok)")
    p.add_argument("--grid", action="store_true",
                   help="use the full 2^i and 3*2^i size grid (the default)")
    p.add_argument("--kernels", default=None,
                   help=f"comma-separated kernel names, may include '{BASELINE}'")
    p.add_argument("--width", type=int, choices=WORD_WIDTHS, default=16)
    p.add_argument("--min-time", type=float, default=2.0,
                   help="minimum seconds per measured round (default 2)")
    p.add_argument("--random-fill", action="store_true",
                   help="benchmark random instead of zero-filled buffers")
    p.add_argument("--csv", default=None, help="write CSV here instead of stdout")
    p.add_argument("--verbose", action="store_true",
                   help="log every round to stderr")

    p = sub.add_parser("selftest", help="randomized correctness check")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--iterations", type=int, default=1000)

    sub.add_parser("kernels", help="list kernels and availability")
    return parser


def cmd_count(args):
    if args.file:
        with open(args.file, "rb") as fh:
            data = fh.read()
    else:
        data = sys.stdin.buffer.read()
    counters = pospopcnt(data, args.width, kernel=args.kernel)
    if args.format == "csv":
        print(",".join(str(v) for v in counters))
    else:
        for v in counters:
            print(v)
    return 0


def cmd_bench(args):
    names = None
    if args.kernels:
        names = tuple(n for n in args.kernels.split(",") if n)
    if names is None:
        names = tuple(d.name for d, ok in list_kernels() if ok) + (BASELINE,)
    sizes = args.sizes if args.sizes else default_size_grid(args.width)
    cfg = BenchConfig(
        sizes=sizes,
        kernels=names,
        width=args.width,
        min_time=args.min_time,
        random_fill=args.random_fill,
    )
    out = open(args.csv, "w") if args.csv else sys.stdout
    log = (lambda msg: print(msg, file=sys.stderr)) if args.verbose else None
    try:
        from .hwcounters import PerfCounters

        probe = PerfCounters()
        hw = probe.available
        probe.close()
        out.write(csv_header(hw) + "\n")
        out.flush()
        run_benchmark(cfg, on_result=lambda r: (out.write(r.csv_row(hw) + "\n"),
                                                out.flush()), log=log)
    finally:
        if args.csv:
            out.close()
    return 0


def cmd_selftest(args):
    ok = run_selftest(iterations=args.iterations, seed=args.seed)
    return 0 if ok else 1


def cmd_kernels(_args):
    for desc, ok in list_kernels():
        flag = "available" if ok else "unavailable"
        print(f"{desc.name:10s} r={desc.r:<6d} block={desc.block_bytes:<7d} {flag}")
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    handler = {
        "count": cmd_count,
        "bench": cmd_bench,
        "selftest": cmd_selftest,
        "kernels": cmd_kernels,
    }[args.command]
    try:
        return handler(args)
    except (InputLengthError, UnknownKernelError, KernelUnavailableError,
            ValueError, OSError) as exc:
        print(f"pospopcnt: error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 1


if __name__ == "__main__":
    sys.exit(main())
