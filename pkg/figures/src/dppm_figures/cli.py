"""Standalone figure script: one positional CSV path plus --kind and --out.

The curvature figure is analytic and takes no CSV.  Exit codes: 0 on
success, 1 on a schema mismatch or render failure, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import sys

from .figures import KINDS, FigureSpec, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dppm-figures",
        description="Regenerate benchmark figures from dppm CSV output",
    )
    parser.add_argument("csv", nargs="?", default=None,
                        help="input CSV (unused for --kind curvature)")
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--png", action="store_true",
                        help="write PNG instead of SVG")
    parser.add_argument("--range", default=None,
                        help="lo:hi x3 range for the curvature figure")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.kind != "curvature" and args.csv is None:
        print(f"error: {args.kind} requires a CSV path", file=sys.stderr)
        return 2
    kwargs = {}
    if args.range is not None:
        try:
            lo, hi = (float(v) for v in args.range.split(":"))
        except ValueError:
            print(f"error: bad --range {args.range!r}", file=sys.stderr)
            return 2
        kwargs.update(lo=lo, hi=hi)
    try:
        spec = FigureSpec(kind=args.kind, out_path=args.out,
                          csv_path=args.csv, raster=args.png, **kwargs)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        render(spec)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
