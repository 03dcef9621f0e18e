"""Command-line surface: compare / psweep."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import PlotSpec, plot_comparison, plot_p_sweep


def cmd_compare(args) -> int:
    spec = PlotSpec(
        aggregate_csv=Path(args.input),
        output=Path(args.out),
        bounds_csv=Path(args.bounds) if args.bounds else None,
        y_scale=args.y_scale,
        algos=args.algos.split(",") if args.algos else None,
    )
    out = plot_comparison(spec)
    print(f"wrote {out}")
    return 0


def cmd_psweep(args) -> int:
    spec = PlotSpec(
        aggregate_csv=Path(args.input),
        output=Path(args.out),
        y_scale=args.y_scale,
        algos=args.algos.split(",") if args.algos else None,
    )
    out = plot_p_sweep(spec)
    print(f"wrote {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sqopt-plot",
        description="Render gap-vs-queries figures from harness CSVs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_cmp = sub.add_parser("compare", help="algorithm comparison with std bands")
    p_cmp.add_argument("--in", dest="input", required=True, metavar="CSV")
    p_cmp.add_argument("--bounds", default=None, metavar="CSV")
    p_cmp.add_argument("--out", required=True, metavar="PNG")
    p_cmp.add_argument("--y-scale", choices=["log", "linear"], default="log")
    p_cmp.add_argument("--algos", default=None,
                       help="comma-separated subset of algo labels")
    p_cmp.set_defaults(func=cmd_compare)

    p_sw = sub.add_parser("psweep", help="exploration-rate sweep")
    p_sw.add_argument("--in", dest="input", required=True, metavar="CSV")
    p_sw.add_argument("--out", required=True, metavar="PNG")
    p_sw.add_argument("--y-scale", choices=["log", "linear"], default="log")
    p_sw.add_argument("--algos", default=None,
                      help="comma-separated subset of algo labels")
    p_sw.set_defaults(func=cmd_psweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
