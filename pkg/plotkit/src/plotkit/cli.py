"""Command line: plotkit <kind> <inputs...> -o out.png [--log-x] [--log-y]."""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .readers import SchemaError
from .render import KINDS, PlotSpec, render


def cli(argv) -> int:
    parser = argparse.ArgumentParser(
        prog="plotkit",
        description="render figures from run and probe output files")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("inputs", nargs="+", help="input CSV/JSONL paths")
    parser.add_argument("-o", "--out", required=True, help="output image")
    parser.add_argument("--log-x", action="store_true")
    parser.add_argument("--log-y", action="store_true")
    args = parser.parse_args(argv)

    spec = PlotSpec(kind=args.kind, inputs=tuple(args.inputs),
                    out_path=args.out, log_x=args.log_x, log_y=args.log_y)
    try:
        path = render(spec)
    except SchemaError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except FileNotFoundError as e:
        print(f"error: input not found: {e.filename}", file=sys.stderr)
        return 1
    print(f"wrote {path}")
    return 0


def main() -> None:
    raise SystemExit(cli(sys.argv[1:]))
