"""``plot_convergence`` entry point."""

import argparse
import sys

from .figure import PlotSpec, render
from .reader import SchemaError


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="plot_convergence",
        description="Render log-log convergence figures from a fracsim "
        "study CSV.",
    )
    parser.add_argument("--csv", required=True, help="input result CSV")
    parser.add_argument("--out", required=True, help="output image (.png)")
    parser.add_argument("--title", default="", help="figure title")
    args = parser.parse_args(argv)
    spec = PlotSpec(input_csv=args.csv, output_image=args.out,
                    title=args.title)
    try:
        render(spec)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
