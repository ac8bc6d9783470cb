"""Batch plotting CLI for harness result CSVs.

  blockbp-plot --mode pl-vs-epsilon --in results.csv --filter d=5 --out fig.png

Exit codes: 0 success, 2 invalid arguments/schema, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import sys

from .plotting import EmptySelectionError, PlotSpec, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blockbp-plot", description=__doc__)
    parser.add_argument(
        "--mode", choices=["pl-vs-epsilon", "pl-vs-d"], required=True,
        help="x axis: noise rate or code distance",
    )
    parser.add_argument("--in", dest="inputs", nargs="+", required=True,
                        help="harness CSV file(s)")
    parser.add_argument("--filter", action="append", default=[], metavar="COL=VAL",
                        help="keep only rows with column equal to value (repeatable)")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--linear-y", action="store_true",
                        help="linear y axis (default: log scale)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    filters = []
    for expr in args.filter:
        if "=" not in expr:
            print(f"error: bad --filter {expr!r}; expected COL=VAL", file=sys.stderr)
            return 2
        col, val = expr.split("=", 1)
        filters.append((col, val))
    spec = PlotSpec(
        inputs=tuple(args.inputs),
        mode=args.mode,
        out_path=args.out,
        filters=tuple(filters),
        log_y=not args.linear_y,
    )
    try:
        render(spec)
    except (SchemaError, EmptySelectionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
