"""CLI: ``figures render --spec <file>`` (one or more spec files)."""

from __future__ import annotations

import argparse
import json
import sys

from .csvdata import SchemaError
from .render import load_figure_spec, render

__version__ = "0.1.0"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figures", description="Render figures from sweep CSV logs"
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render figures from TOML spec files")
    p.add_argument(
        "--spec",
        action="append",
        required=True,
        help="figure spec TOML (repeatable)",
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        for spec_path in args.spec:
            out = render(load_figure_spec(spec_path))
            print(f"wrote {out}")
        return 0
    except (SchemaError, OSError) as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
