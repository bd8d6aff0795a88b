"""Command line for rendering figures from run directories."""

from __future__ import annotations

import argparse

from .artifacts import ArtifactError, RunArtifacts
from .figures import plot_drift, plot_fields, plot_scalings


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="twochlab-plots", description="Render figures from twochlab run outputs"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    fields = sub.add_parser("fields", help="space-time panels of u and H")
    fields.add_argument("--run", required=True, help="run output directory")
    fields.add_argument("--out", required=True, help="image file (extension picks format)")
    drift = sub.add_parser("drift", help="conserved-quantity drift curves")
    drift.add_argument("--run", required=True)
    drift.add_argument("--out", required=True)
    scalings = sub.add_parser("scalings", help="log-log sweep points with fitted slope")
    scalings.add_argument("reports", nargs="+", help="report.json files")
    scalings.add_argument("--out", required=True)
    args = parser.parse_args(argv)

    try:
        if args.command == "fields":
            out = plot_fields(RunArtifacts.from_dir(args.run), args.out)
        elif args.command == "drift":
            out = plot_drift(RunArtifacts.from_dir(args.run), args.out)
        else:
            out = plot_scalings(args.reports, args.out)
    except ArtifactError as err:
        print(f"artifact error: {err}")
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
