"""Which (r, eta_s, eta_e) keep N ordered in T at theta = pi/4."""
import itertools
import math

from collmodel import StepConfig, evolve

T_GRID = (0.0, 0.209, 0.5, 1.0)


def main():
    print("r,eta_s,eta_e,N(0),N(0.209),N(0.5),N(1),ordered")
    for r, es, ee in itertools.product((0.3, 0.4, 0.5, 0.6, 0.7), (0.5, 0.7, 0.9, 1.0), (0.5, 0.7, 0.9, 1.0)):
        n = [evolve("werner:0.9712", StepConfig(r=r, T=T, theta=math.pi / 4, eta_s=es, eta_e=ee), 6).nm().N
             for T in T_GRID]
        ok = n[0] < n[1] < n[3] and all(b >= a for a, b in zip(n, n[1:]))
        print(f"{r},{es},{ee}," + ",".join(f"{v:.4f}" for v in n) + f",{int(ok)}")


if __name__ == "__main__":
    main()
