#!/usr/bin/env python3
"""Reproduce the volume-decay figure data: vol(P_n) vs 1/sqrt(n!).

Writes a CSV with one row per n; plot columns 2 and 6 against column 1 on a
log scale to recreate the comparison plot.
"""

import argparse

from twooptlab.cli import main as cli_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n-min", type=int, default=5)
    parser.add_argument("--n-max", type=int, default=12)
    parser.add_argument("--samples", type=int, default=4_000_000)
    parser.add_argument("--seed", type=int, default=2029)
    parser.add_argument("--out", type=str, default="figure_sweep.csv")
    args = parser.parse_args()
    return cli_main(
        [
            "figure",
            "--n-min", str(args.n_min),
            "--n-max", str(args.n_max),
            "--samples", str(args.samples),
            "--seed", str(args.seed),
            "--out", args.out,
        ]
    )


if __name__ == "__main__":
    raise SystemExit(main())
