"""Build higher-rank KT witnesses on random settings and print the violation sizes.

Usage: python3 scripts/witness_demo.py [--n 5] [--p 2] [--count 5] [--seed 0]
"""
import argparse

import numpy as np

from hodgekt import KTSetting, TorusModel, find_witness, higher_rank_kt, hodge_condition
from hodgekt.exterior import from_hermitian, power
from hodgekt.generators import random_positive_definite, random_semipositive_levels, random_two_positive


def random_setting(n, p, rng):
    lam = [n - 2 * p] if n > 2 * p else []
    levels = random_semipositive_levels(n, lam, rng)
    eta = random_positive_definite(n, rng)
    omega = KTSetting.from_levels(levels, eta, np.eye(n), p).omega
    alpha = random_two_positive(omega ^ power(from_hermitian(eta), 2 * p - 2), eta, rng)
    return KTSetting.from_levels(levels, eta, alpha, p)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=5)
    ap.add_argument("--p", type=int, default=2)
    ap.add_argument("--count", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    print(f"Hodge condition on the {args.n}-torus at p={args.p}: "
          f"{hodge_condition(TorusModel(args.n), args.p)}")
    print(f"{'run':>3}  {'d_prime':>7}  {'lhs':>12}  {'rhs':>12}  {'diff/scale':>11}")
    for i in range(args.count):
        s = random_setting(args.n, args.p, rng)
        s.check()
        d_prime, gamma = find_witness(s)
        rep = higher_rank_kt(s, gamma)
        print(f"{i:>3}  {d_prime:>7}  {rep.lhs:>12.5g}  {rep.rhs:>12.5g}  {rep.difference / rep.scale:>11.3e}")


if __name__ == "__main__":
    main()
