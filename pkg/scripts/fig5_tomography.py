"""Simulated tomography along one trajectory: truth, MC mean and spread per step."""
import argparse
import math

from collmodel import StepConfig, evolve
from collmodel.tomography import mc_errorbars, projector_set


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--input", default="werner:0.9712")
    ap.add_argument("--T", type=float, default=1.0)
    ap.add_argument("--theta", type=float, default=math.pi / 4)
    ap.add_argument("--shots", type=int, default=10_000)
    ap.add_argument("--mc", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    pset = projector_set()
    traj = evolve(args.input, StepConfig(T=args.T, theta=args.theta), 6)
    print("step,C_true,C_mean,C_std,z")
    for rec in traj.records:
        if rec.rho_as is None:
            continue
        res = mc_errorbars(rec.rho_as, args.shots, args.mc, args.seed + rec.k * args.mc, pset)
        z = (res.C_mean - rec.C_as) / res.C_std if res.C_std > 0 else float("nan")
        print(f"{rec.k},{rec.C_as:.4f},{res.C_mean:.4f},{res.C_std:.4f},{z:+.2f}")


if __name__ == "__main__":
    main()
