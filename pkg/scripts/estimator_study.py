"""One-step estimator study on u' = -u at dt = 0.1, one CSV per scheme."""

import argparse
import pathlib
import sys

from projrk.cli import main

SCHEMES = ("ephpfe", "posv", "pisv", "embedded_heun_fe", "emr")

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="results/estimators", type=pathlib.Path)
    ap.add_argument("--lams", default="log:-6:-1:51")
    a = ap.parse_args()
    a.outdir.mkdir(parents=True, exist_ok=True)
    codes = [main(["estimators", s, "--lams", a.lams, "--out", str(a.outdir / f"{s}.csv")]) for s in SCHEMES]
    sys.exit(max(codes))
