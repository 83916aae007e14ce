#!/usr/bin/env python3
"""Emit the CSV curve data behind the figures.

Writes three files into --outdir (default ./figures):
  residual_pen1_wide.csv   -- the penalty-1 residual on [0, 15]
  residual_pen1_zoom.csv   -- the same curve on [0, 1.1]
  lower_family.csv         -- the five reference transform profiles

Usage:
    python scripts/figure_data.py [--outdir figures] [--samples 3000]
"""

import argparse
import csv
import pathlib

from fel import tables
from fel.lower import curve_samples as lower_curve
from fel.upper import curve_samples as upper_curve


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--outdir", default="figures")
    ap.add_argument("--samples", type=int, default=3000)
    args = ap.parse_args()
    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    _, up1 = tables.upper_reference()["1"]
    for name, lo, hi in (("residual_pen1_wide.csv", 0.0, 15.0),
                         ("residual_pen1_zoom.csv", 0.0, 1.1)):
        with open(outdir / name, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "re", "abs"])
            w.writerows(upper_curve(up1, lo, hi, args.samples))
        print("wrote", outdir / name)

    ref = tables.lower_reference()
    columns = {k: lower_curve(ref[k][1], -1.5, 0.5, args.samples) for k in tables.PENALTIES}
    with open(outdir / "lower_family.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t"] + ["pen_" + k.replace("/", "_") for k in tables.PENALTIES])
        for i in range(args.samples):
            t = columns[tables.PENALTIES[0]][i][0]
            w.writerow([t] + [columns[k][i][1] for k in tables.PENALTIES])
    print("wrote", outdir / "lower_family.csv")


if __name__ == "__main__":
    main()
