"""Piecewise-polynomial fit of the SU(2) moduli volume along theta, written to CSV."""

import argparse
import csv

import numpy as np

from localize.liegroups import build_root_system
from localize.moduli import piecewise_poly_fit, volume_along_line


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--genus", type=int, default=2)
    ap.add_argument("--points", type=int, default=200)
    ap.add_argument("--csv", default="volume_line.csv")
    args = ap.parse_args()
    A1 = build_root_system("A1")
    thetas = np.linspace(0.05, 2 * np.pi - 0.05, args.points)
    values, errors = volume_along_line(A1, args.genus, thetas)
    pieces = piecewise_poly_fit(A1, args.genus, thetas=thetas, values=values)
    for p in pieces:
        print(f"[{p.interval[0]:.4f}, {p.interval[1]:.4f}] degree {p.degree} residual {p.residual:.2e} "
              f"coefficients {np.round(p.coefficients, 10).tolist()}")
    with open(args.csv, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["theta", "volume", "extrapolation_error"])
        w.writerows(zip(thetas, values, errors))
    print(f"wrote {args.csv}")


if __name__ == "__main__":
    main()
