"""Echo of a scar state under seeded random circuits, on the gauge and Ising sides."""

import argparse
import json

import numpy as np

from scarlab.dynamics import RandomCircuitAngles, random_circuit_echo, write_trajectory_csv
from scarlab.geometry import Geometry
from scarlab.scars import ScarLabel, scar_state
from scarlab.sectors import enumerate_lgt_sector


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--L", type=int, default=5)
    ap.add_argument("--layers", type=int, default=200)
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--distribution", default="cue", choices=["cue", "uniform"])
    ap.add_argument("--out", default="results/random_circuit_echo.csv")
    args = ap.parse_args()

    L = args.L
    label = ScarLabel("odd", alpha=1, k=1)
    lgt = scar_state(L, label, "lgt", enumerate_lgt_sector(Geometry(L, 2)))
    ising = scar_state(L, label, "ising")
    mags, worst = [], 0.0
    for seed in range(args.seeds):
        angles = RandomCircuitAngles.draw(seed, args.layers, args.distribution)
        a = random_circuit_echo(lgt, angles, args.layers).values
        b = random_circuit_echo(ising, angles, args.layers).values
        worst = max(worst, float(np.max(np.abs(a - b))))
        mags.append(np.abs(a))
    mags = np.array(mags)
    write_trajectory_csv(args.out, np.arange(args.layers + 1), {"mean_abs": mags.mean(0), "std_abs": mags.std(0)},
                         x_name="s", comment=json.dumps(vars(args)))
    late = mags[:, -args.layers // 4 :].mean()
    print(json.dumps({"L": L, "late_mean_abs": late, "reference": 1 / np.sqrt(4 * L),
                      "max_gauge_ising_difference": worst}, indent=1))


if __name__ == "__main__":
    main()
