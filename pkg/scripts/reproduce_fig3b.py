"""Fluctuation of the averaged output against a linear coupler-phase sweep, for n=20 and n=2000.

    python3 scripts/reproduce_fig3b.py --out runs/fig3b
"""

import argparse
import sys

from uskd.cli import main

if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", default="runs/fig3b")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=100)
    a = p.parse_args()
    sys.exit(main(["fig3b", "--seed", str(a.seed), "--repeats", str(a.repeats), "--out", a.out]))
