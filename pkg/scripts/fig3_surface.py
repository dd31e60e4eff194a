"""C_as over (T, theta) for the Werner input, one row per grid point and step.

    python scripts/fig3_surface.py --out fig3.csv
"""
import argparse
import csv
import math
import sys

import numpy as np

from collmodel import StepConfig, sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--input", default="werner:0.9712")
    ap.add_argument("--steps", type=int, default=6)
    ap.add_argument("--nT", type=int, default=21)
    ap.add_argument("--ntheta", type=int, default=25)
    ap.add_argument("--out")
    args = ap.parse_args()

    T = np.linspace(0.0, 1.0, args.nT)
    theta = np.linspace(0.0, 2 * math.pi, args.ntheta)
    rows = sweep(args.input, T, theta, args.steps, StepConfig(), max_workers=4)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["T", "theta", "step", "C_as", "C_ae", "N_cum"])
    for r in rows:
        w.writerow([f"{r.T:.6g}", f"{r.theta:.6g}", r.step,
                    "" if r.C_as is None else f"{r.C_as:.6f}",
                    "" if r.C_ae is None else f"{r.C_ae:.6f}", f"{r.N_cum:.6f}"])
    if args.out:
        fh.close()


if __name__ == "__main__":
    main()
