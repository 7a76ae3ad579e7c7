"""Spectrum and half-cut entropies of the two-leg ladder for a list of couplings."""

import argparse
import os

from scarlab.cli import main as cli_main


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--L", type=int, default=5)
    ap.add_argument("--g", type=float, nargs="+", default=[0.1, 0.5, 0.9, 1.5, 2.5])
    ap.add_argument("--side", default="lgt", choices=["lgt", "ising"])
    ap.add_argument("--outdir", default="results")
    args = ap.parse_args()

    os.makedirs(args.outdir, exist_ok=True)
    for g in args.g:
        out = os.path.join(args.outdir, f"spectrum_{args.side}_L{args.L}_g{g}.csv")
        code = cli_main(["spectrum", "--L", str(args.L), "--g", str(g), "--side", args.side, "--out", out])
        print(f"g={g}: exit {code}, {out}")


if __name__ == "__main__":
    main()
