"""Convergence study on the two-scale model problem.

Writes three CSVs into --outdir: the shrinking-lambda sweep, the fixed-inner
sweep (inner step held at eps while dt halves) and the literal fixed-lambda
sweep, which overflows for the stiff setting and is kept to show that.
"""

import argparse
import pathlib
import sys

from projrk.cli import main

SCHEMES = ["pfe:K=1", "pisv", "posv", "prk4k1", "prk4k2"]


def run(outdir: pathlib.Path, eps: float, halvings: int) -> int:
    outdir.mkdir(parents=True, exist_ok=True)
    worst = 0
    for mode in ("shrinking-lambda", "fixed-inner", "fixed-lambda"):
        argv = ["converge", *SCHEMES, "--mode", mode, "--eps", repr(eps), "--halvings", str(halvings),
                "--out", str(outdir / f"converge_{mode}.csv")]
        worst = max(worst, main(argv))
    return worst


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="results/convergence", type=pathlib.Path)
    ap.add_argument("--eps", default=1e-5, type=float)
    ap.add_argument("--halvings", default=7, type=int)
    a = ap.parse_args()
    sys.exit(run(a.outdir, a.eps, a.halvings))
