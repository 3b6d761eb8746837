"""Write every noise-sweep panel as CSV traces under one output directory.

    python3 scripts/reproduce_fig2.py --out runs/fig2 --seed 0
"""

import argparse
import math
import sys

from uskd.cli import main

PANELS = {
    "top": [],
    "avg-coupler": ["--ranges", ",".join(f"{k * math.pi / 4:.12g}" for k in range(9))],
    "repeats": ["--ranges", f"{2 * math.pi:.12g}"],
    "avg-channel": ["--ranges", ",".join(f"{r:.12g}" for r in (2 * math.pi, math.pi / 2, math.pi / 5))],
}


def run(out: str, seed: int, workers: int) -> int:
    for panel, extra in PANELS.items():
        code = main(["fig2", "--panel", panel, "--seed", str(seed), "--workers", str(workers), "--out", f"{out}/{panel}", *extra])
        if code:
            return code
    return 0


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", default="runs/fig2")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=0)
    a = p.parse_args()
    sys.exit(run(a.out, a.seed, a.workers))
