"""Worst residual against the quoted N values as a function of theta.

theta here is the e1-relative phase. The opposite sign convention is the
same curve read at 2 pi - theta, so one full turn covers both.
"""
import argparse
import math

import numpy as np

from collmodel import StepConfig, evolve

QUOTED = {1.0: 0.475, 0.25: 0.185, 0.0625: 0.005}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--input", default="werner:0.9712")
    ap.add_argument("--points", type=int, default=145)
    args = ap.parse_args()

    best = (math.inf, None)
    print("theta/pi,N(1),N(1/4),N(1/16),max_residual")
    for th in np.linspace(0.0, 2 * math.pi, args.points):
        n = {T: evolve(args.input, StepConfig(T=T, theta=th), 6).nm().N for T in QUOTED}
        res = max(abs(n[T] - QUOTED[T]) for T in QUOTED)
        best = min(best, (res, th))
        print(f"{th / math.pi:.4f},{n[1.0]:.4f},{n[0.25]:.4f},{n[0.0625]:.4f},{res:.4f}")
    print(f"# best theta/pi={best[1] / math.pi:.4f} residual={best[0]:.4f}")


if __name__ == "__main__":
    main()
