"""Sweep the Hodge index suite over dimensions and degeneracy modes and tabulate signatures.

Usage: python3 scripts/signature_sweep.py [--instances 10] [--seed 0] [--max-n 6]
"""
import argparse
from collections import Counter

from hodgekt.suites import DEGENERATE, InstanceSpec, run_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--instances", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-n", type=int, default=6)
    args = ap.parse_args()
    print(f"{'n':>2}  {'degenerate':<10}  {'pass':>4}  {'fail':>4}  {'min |eig|':>10}  verdicts")
    for n in range(2, args.max_n + 1):
        for mode in DEGENERATE:
            spec = InstanceSpec(suite="hodge-index", n=n, degenerate=mode,
                                instances=args.instances, seed=args.seed)
            rep = run_suite(spec)
            verdicts = Counter(i["detail"].get("verdict", i["status"]) for i in rep.instances)
            gaps = [min(abs(e) for e in i["detail"]["eigs"]) for i in rep.instances if i["detail"].get("eigs")]
            gap = f"{min(gaps):.3e}" if gaps else "-"
            print(f"{n:>2}  {mode:<10}  {rep.passed:>4}  {rep.failed:>4}  {gap:>10}  {dict(verdicts)}")


if __name__ == "__main__":
    main()
