#!/usr/bin/env python3
"""Write the lambda - r_c exclusion raster and boundary polylines as CSV."""

import argparse
from pathlib import Path

from grwlab.cli import run


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="exclusion_out")
    ap.add_argument("--bounds", default="default")
    args = ap.parse_args()

    code = run(["exclusion", "--out", args.out, "--bounds", args.bounds])
    if code == 0:
        for name in ("raster.csv", "boundary.csv", "summary.json"):
            print(Path(args.out) / name)
    raise SystemExit(code)


if __name__ == "__main__":
    main()
