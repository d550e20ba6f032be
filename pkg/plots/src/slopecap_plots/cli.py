"""Command line: ``plot profiles|boundaries --in <dir> --out <file> [--times ...]``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import PlotSpec, plot_free_boundaries, plot_profiles, profile_residual_max


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot", description="Render slopecap CSV output to figures.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("profiles", "boundaries"):
        cmd = sub.add_parser(name)
        cmd.add_argument("--in", dest="input_dir", required=True,
                         help="directory holding the CSV files")
        cmd.add_argument("--out", dest="output", required=True,
                         help="image file to write")
        cmd.add_argument("--times", nargs="*", type=float, default=None,
                         help="snapshot times to draw (profiles only; default all)")
    args = parser.parse_args(argv)

    spec = PlotSpec(
        input_dir=Path(args.input_dir),
        output=Path(args.output),
        times_to_plot=list(args.times) if args.times else [],
    )
    if args.times is not None and not args.times:
        print("error: --times given without values", file=sys.stderr)
        return 1
    try:
        if args.command == "profiles":
            path = plot_profiles(spec)
            worst = profile_residual_max(spec.input_dir, spec.times_to_plot)
            print(f"wrote {path} (residual max {worst!r})")
        else:
            path = plot_free_boundaries(spec)
            print(f"wrote {path}")
    except (FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
