#!/usr/bin/env python3
"""CLI: render one plot from a sweep-result CSV.

Example:
    python figures/plot_results.py runs/fig2.csv --x k --y sum_rate_raw \
        --group scheme --output fig2.png
"""

from __future__ import annotations

import argparse
import sys

from plotting import PlotSpec, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("csv", help="run CSV produced by the simulator")
    parser.add_argument("--x", default="k", help="x-axis column (default: k)")
    parser.add_argument(
        "--y", default="sum_rate_raw", help="y-axis column (default: sum_rate_raw)"
    )
    parser.add_argument("--group", default="scheme", help="series column (default: scheme)")
    parser.add_argument("--no-error-bars", action="store_true")
    parser.add_argument("--output", default="plot.png", help="output image path")
    parser.add_argument("--title", default="")
    parser.add_argument(
        "--filter",
        action="append",
        default=[],
        metavar="COL=VALUE",
        help="keep only rows where COL equals VALUE (repeatable)",
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    filters = {}
    for item in args.filter:
        if "=" not in item:
            print(f"error: --filter expects COL=VALUE, got {item!r}", file=sys.stderr)
            return 1
        col, _, val = item.partition("=")
        filters[col] = val
    spec = PlotSpec(
        csv_path=args.csv,
        x=args.x,
        y=args.y,
        group=args.group,
        error_bars=not args.no_error_bars,
        output=args.output,
        title=args.title,
        filters=filters,
    )
    try:
        path = render(spec)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
