"""figgen command line: render one figure from one CSV.

    figgen KIND INPUT.csv -o OUT.png [--style FILE] [--overlaps] [--title T]

Exit codes: 0 success (including empty-input warnings), 2 schema or usage
errors, 1 anything else.
"""

import argparse
import sys

from .render import KINDS, FigureSpec, FileError, SchemaMismatch, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figgen",
        description="Render a figure from a simulator CSV output.")
    parser.add_argument("kind", choices=KINDS, help="figure kind")
    parser.add_argument("input", help="input CSV path")
    parser.add_argument("-o", "--output", required=True, help="output image path")
    parser.add_argument("--style", default=None,
                        help="matplotlib style file (default: pinned package style)")
    parser.add_argument("--overlaps", action="store_true",
                        help="dressed figures: add the overlap heat-strip panel")
    parser.add_argument("--title", default=None, help="figure title override")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(kind=args.kind, csv_path=args.input,
                      out_path=args.output, style_path=args.style,
                      show_overlaps=args.overlaps, title=args.title)
    try:
        path = render(spec)
    except SchemaMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (FileError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
