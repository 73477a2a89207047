#!/usr/bin/env python3
"""How the chance of admitting a correct variable decays as true variables
are pre-included: stage-wise hit rates with 0..4 pre-included features."""

import argparse

from enns.studies import next_selection_hit_rate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--p", type=int, default=500)
    ap.add_argument("--s", type=int, default=5)
    ap.add_argument("--reps", type=int, default=100)
    ap.add_argument("--seed", type=int, default=51)
    args = ap.parse_args()

    print(f"n={args.n} p={args.p} s={args.s} reps={args.reps}")
    print("pre-included  hit-rate")
    for pre in range(args.s):
        rate = next_selection_hit_rate(
            n=args.n, p=args.p, s=args.s, pre_included=pre, reps=args.reps, seed=args.seed
        )
        print(f"{pre:>11d}  {rate:.3f}")


if __name__ == "__main__":
    main()
