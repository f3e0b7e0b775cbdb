"""Batch renderer: one figure id per invocation.

    es2n-figures <figure-id> --out figure.png input1.csv [input2.csv ...]
"""

from __future__ import annotations

import argparse
import sys

from .render import FIGURE_IDS, FigureSpec, SchemaError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="es2n-figures",
        description="Render experiment CSV outputs as figures")
    parser.add_argument("figure", choices=FIGURE_IDS)
    parser.add_argument("inputs", nargs="+", help="input CSV paths")
    parser.add_argument("--out", required=True, help="output image path (.png/.svg)")
    args = parser.parse_args(argv)
    try:
        spec = FigureSpec(figure=args.figure, inputs=tuple(args.inputs),
                          output=args.out)
        path = render(spec)
    except (SchemaError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
