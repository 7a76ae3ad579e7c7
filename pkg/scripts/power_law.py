"""Power-law decay of the scar echo inside the 4L-dimensional span.

Prints the envelope slope for each coupling and writes the echo at the first one.
"""

import argparse
import json

import numpy as np

from scarlab.dynamics import power_law_exponent, scar_subspace_echo, write_trajectory_csv
from scarlab.hamiltonian import CouplingConfig
from scarlab.scars import ScarLabel


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--L", type=int, default=901)
    ap.add_argument("--g", type=float, nargs="+", default=[0.9])
    ap.add_argument("--n", type=int, default=20001)
    ap.add_argument("--out", default="results/power_law.csv")
    args = ap.parse_args()

    label = ScarLabel("odd", alpha=1, k=1)
    slopes = {}
    for i, g in enumerate(args.g):
        times = np.linspace(0.0, 1000.0 / g, args.n)
        series = scar_subspace_echo(args.L, CouplingConfig(g), label, times)
        slopes[g] = power_law_exponent(series, g)
        if i == 0:
            write_trajectory_csv(args.out, g * times, {"abs": series.magnitude}, x_name="gt",
                                 comment=json.dumps({"L": args.L, "g": g}))
    print(json.dumps({"L": args.L, "slopes": slopes}, indent=1))


if __name__ == "__main__":
    main()
