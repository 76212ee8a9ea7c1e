"""Run the `table2` experiment with its default configuration.

Usage: python scripts/run_table2.py [--config PATH] [--seed N] [--out DIR] [--strategy S]
Results go to results/table2 unless --out is given.
"""

import sys

from seqaudit.cli import main

if __name__ == "__main__":
    args = sys.argv[1:]
    if "--out" not in args:
        args += ["--out", "results/table2"]
    sys.exit(main(["table2", *args]))
