"""Run the `synthetic` experiment with its default configuration.

Usage: python scripts/run_synthetic.py [--config PATH] [--seed N] [--out DIR] [--strategy S]
Results go to results/synthetic unless --out is given.
"""

import sys

from seqaudit.cli import main

if __name__ == "__main__":
    args = sys.argv[1:]
    if "--out" not in args:
        args += ["--out", "results/synthetic"]
    sys.exit(main(["synthetic", *args]))
