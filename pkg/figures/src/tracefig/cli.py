"""Command line wrapper: tracefig render --trace a.csv [--trace b.csv] --out dir."""

from __future__ import annotations

import argparse
import json
import sys

from .panels import PANELS, STANDARD_PANELS
from .render import render
from .schema import MissingColumnError, SchemaError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tracefig",
        description="multi-panel comparison figures from trace CSVs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="render panel images from traces")
    p.add_argument("--trace", action="append", required=True,
                   metavar="CSV", help="trace file; repeat for side-by-side "
                                       "columns")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--panel", action="append", choices=sorted(PANELS),
                   help=f"panel to draw; repeatable "
                        f"(default: {' '.join(STANDARD_PANELS)})")
    p.add_argument("--format", action="append", choices=("png", "svg"),
                   help="output format; repeatable (default: both)")
    return parser


def entry(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        written = render(args.trace, args.out,
                         panels=args.panel,
                         formats=tuple(args.format or ("png", "svg")))
    except (SchemaError, MissingColumnError, KeyError, ValueError,
            OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(json.dumps({"written": [str(p) for p in written]}, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(entry())
