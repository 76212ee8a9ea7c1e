"""Run the `decouple` experiment with its default configuration.

Usage: python scripts/run_decouple.py [--config PATH] [--seed N] [--out DIR] [--strategy S]
Results go to results/decouple unless --out is given.
"""

import sys

from seqaudit.cli import main

if __name__ == "__main__":
    args = sys.argv[1:]
    if "--out" not in args:
        args += ["--out", "results/decouple"]
    sys.exit(main(["decouple", *args]))
