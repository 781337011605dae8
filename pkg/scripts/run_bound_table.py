#!/usr/bin/env python3
"""Tabulate the counting bounds (log space) over construction sizes."""

import argparse
import json

from twooptlab import counting_bounds


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--ns", type=int, nargs="+", default=[5, 9, 17, 33, 65])
    parser.add_argument("--samples", type=int, default=200_000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    table = [counting_bounds(n, samples=args.samples, seed=args.seed).to_json_dict()
             for n in args.ns]
    print(json.dumps(table, indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
