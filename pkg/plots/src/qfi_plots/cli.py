"""Command line front end: plot <kind> --in <csv> --out <image>."""

from __future__ import annotations

import argparse
import sys

from .render import PlotDataError, PlotJob, render


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="qfi-plot", description="Render thermoqfi CSV artifacts")
    parser.add_argument("kind", choices=("lines", "contour"))
    parser.add_argument("--in", dest="input_csv", required=True,
                        help="input CSV (scan contract for lines, grid for contour)")
    parser.add_argument("--out", dest="output_image", required=True,
                        help="output image path (.png for raster, .svg/.pdf for vector)")
    parser.add_argument("--title", default="")
    parser.add_argument("--xlabel", default="")
    parser.add_argument("--ylabel", default="")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    job = PlotJob(input_csv=args.input_csv, kind=args.kind,
                  output_image=args.output_image, title=args.title,
                  xlabel=args.xlabel, ylabel=args.ylabel)
    try:
        result = render(job)
    except (PlotDataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if result.grid_shape is not None:
        print(f"wrote {result.output_image} ({result.grid_shape[0]}x"
              f"{result.grid_shape[1]} grid)")
    else:
        print(f"wrote {result.output_image} ({result.thick_traces} thick + "
              f"{result.thin_traces} thin traces)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
