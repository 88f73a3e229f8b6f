"""|g(z)| on the slow and fast windows for a handful of schemes.

The CSVs (re, im, g_abs) are meant for contour plotting at the level 1.
"""

import argparse
import pathlib
import sys

from projrk.cli import main

SCHEMES = {
    "fe": "fe",
    "rk4_38": "rk4_38",
    "pfe_K1": "pfe:K=1,lam=0.01",
    "pfe_K2": "pfe:K=2,lam=0.01",
    "prk4k1": "prk4k1:lam=0.01",
    "prk4k2": "prk4k2:lam=0.01",
}


def main_(outdir: pathlib.Path, workers: int, n: int) -> int:
    outdir.mkdir(parents=True, exist_ok=True)
    codes = []
    for label, scheme in SCHEMES.items():
        for window in ("slow", "fast"):
            if window == "fast" and "lam" not in scheme:
                continue  # no inner step to size the fast window from
            codes.append(main(["stability", scheme, "--window", window, "--nx", str(n), "--ny", str(n),
                               "--workers", str(workers), "--out", str(outdir / f"{label}_{window}.csv")]))
    return max(codes)


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="results/stability", type=pathlib.Path)
    ap.add_argument("--workers", default=1, type=int)
    ap.add_argument("--n", default=201, type=int, help="samples per axis")
    a = ap.parse_args()
    sys.exit(main_(a.outdir, a.workers, a.n))
