#!/usr/bin/env python3
"""Emit the deterministic gap curves behind the coefficient checks.

For a range of n this prints (and optionally saves) the scaled sup gap
n * sup_t |a_{n+[nt]}/a_n - (1+t)^{1-2p}| and the logarithmic-clock gap
sup_t |log_n(n + [n^t]) - (1 v t)| with its explicit bound, handy for
eyeballing the 1/n and 1/log n decay.

Usage:
    python scripts/gap_curves.py [--p 0.9] [--T 2.0] [--out curves.csv]
"""

import argparse
import math

from erwlab import coeff


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=float, default=0.9)
    ap.add_argument("--T", type=float, default=2.0)
    ap.add_argument("--out", type=str, default=None)
    args = ap.parse_args()

    rows = []
    print(f"{'n':>8} {'n*ratio_gap':>14} {'clock_gap':>12} {'clock_bound':>12}")
    for n in (100, 316, 1000, 3162, 10_000, 31_623):
        rg = coeff.ratio_gap(args.p, n, args.T)
        cg = coeff.log_clock_gap(n, args.T)
        bound = max(math.log(2) / math.log(n),
                    abs(math.log(1 - float(n) ** -args.T)) / math.log(n))
        print(f"{n:>8} {n * rg:>14.6f} {cg:>12.6f} {bound:>12.6f}")
        rows.append((n, rg, n * rg, cg, bound))

    if args.out:
        with open(args.out, "w") as fh:
            fh.write("n,ratio_gap,n_ratio_gap,clock_gap,clock_bound\n")
            for row in rows:
                fh.write(",".join(repr(float(x)) for x in row) + "\n")
        print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
