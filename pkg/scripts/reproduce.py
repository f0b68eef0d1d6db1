#!/usr/bin/env python3
"""Run the full verification suite and collect figure-grade data.

Desk preset (default) takes a couple of minutes on two cores and writes
everything under results/desk; `--preset smoke` finishes in seconds with
reduced sample sizes and widened tolerances.

Usage:
    python scripts/reproduce.py [--preset desk|smoke] [--seed N] [--out DIR]
"""

import argparse
import sys

from erwlab import cli


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--preset", choices=["desk", "smoke"], default="desk")
    ap.add_argument("--seed", type=int, default=cli.DEFAULT_SEED)
    ap.add_argument("--out", type=str, default=None)
    args = ap.parse_args()
    out = args.out or f"results/{args.preset}"
    return cli.main(["test", "--experiment", "all", "--preset", args.preset,
                     "--seed", str(args.seed), "--out-dir", out])


if __name__ == "__main__":
    sys.exit(main())
