"""figgen command line: one figure kind per invocation."""

from __future__ import annotations

import argparse
import sys

from .core import FIGURE_KINDS, FigureError, FigureSpec, render


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="figgen",
        description="Render publication-style figures from a chaoscope run "
                    "directory (CSV outputs plus manifest.json).",
    )
    ap.add_argument("run_dir", help="run directory with manifest.json")
    ap.add_argument("--figure", required=True, choices=FIGURE_KINDS)
    ap.add_argument("--out", required=True,
                    help="output path (.svg or .pdf)")
    args = ap.parse_args(argv)
    try:
        spec = FigureSpec(args.figure, args.run_dir, args.out)
        path = render(spec)
    except FigureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
