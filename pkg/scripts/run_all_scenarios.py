#!/usr/bin/env python3
"""Run every builtin scenario with its reference gains and write CSV + SVG
artifacts into out/ (one subdirectory per scenario).

Usage: python scripts/run_all_scenarios.py [--out DIR] [--dt X]
"""
import argparse
import os
import sys

from paramest import cli
from paramest.catalog import BUILTIN_NAMES


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out")
    parser.add_argument("--dt", type=float, default=None)
    args = parser.parse_args()

    for name in BUILTIN_NAMES:
        target = os.path.join(args.out, name)
        os.makedirs(target, exist_ok=True)
        argv = ["run", "--scenario", name, "--out", target]
        if args.dt is not None:
            argv += ["--dt", str(args.dt)]
        print(f"==> {name}")
        code = cli.main(argv)
        if code != 0:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
