"""N against filter transmissivity at both candidate angles, next to the quoted values."""
import argparse
import math

from collmodel import StepConfig, evolve

QUOTED = {1.0: 0.475, 0.25: 0.185, 0.0625: 0.005}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--input", default="werner:0.9712")
    ap.add_argument("--steps", type=int, default=6)
    args = ap.parse_args()

    grid = sorted(set(QUOTED) | {0.0, 0.125, 0.209, 0.5, 0.75})
    print("T,N(pi/4),N(pi/2),quoted")
    for T in grid:
        n = [evolve(args.input, StepConfig(T=T, theta=th), args.steps).nm().N for th in (math.pi / 4, math.pi / 2)]
        q = QUOTED.get(T)
        print(f"{T:g},{n[0]:.4f},{n[1]:.4f},{'' if q is None else q}")


if __name__ == "__main__":
    main()
