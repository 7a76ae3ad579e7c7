"""Loschmidt echo of a scar and a non-scar initial state on the gauge side.

Writes one CSV per initial state and prints the late-time averages next to
1/sqrt(4L) and 1/sqrt(2^(2L-1)).
"""

import argparse
import json
import time

import numpy as np

from scarlab.dynamics import loschmidt_echo, non_scar_initial_state, scar_subspace_echo, write_trajectory_csv
from scarlab.geometry import Geometry
from scarlab.hamiltonian import CouplingConfig
from scarlab.krylov import FlipHamiltonian
from scarlab.scars import ScarLabel, scar_state
from scarlab.sectors import enumerate_lgt_sector


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--L", type=int, default=11)
    ap.add_argument("--g", type=float, default=0.9)
    ap.add_argument("--T", type=float, default=100.0)
    ap.add_argument("--n", type=int, default=401)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/echo")
    args = ap.parse_args()

    L, cfg = args.L, CouplingConfig(args.g)
    geom = Geometry(L, 2)
    basis = enumerate_lgt_sector(geom)
    H = FlipHamiltonian.build(geom, basis, cfg)
    times = np.linspace(0.0, args.T, args.n)
    label = ScarLabel("odd", alpha=1, k=1)
    summary = {"L": L, "g": args.g, "T": args.T, "n": args.n, "seed": args.seed}
    runs = {
        "scar": scar_state(L, label, "lgt", basis),
        "nonscar": non_scar_initial_state(basis, args.seed),
    }
    for name, psi in runs.items():
        t0 = time.time()
        echo = loschmidt_echo(H, psi, times)
        v = echo.values
        write_trajectory_csv(f"{args.out}_{name}.csv", times,
                             {"re": v.real, "im": v.imag, "abs": np.abs(v)},
                             comment=json.dumps(summary))
        summary[name] = echo.late_time_average()
        summary[f"{name}_seconds"] = round(time.time() - t0, 1)
    summary["scar_subspace"] = scar_subspace_echo(L, cfg, label, times).late_time_average()
    summary["scar_reference"] = 1 / np.sqrt(4 * L)
    summary["nonscar_reference"] = 1 / np.sqrt(2 ** (2 * L - 1))
    print(json.dumps(summary, indent=1))


if __name__ == "__main__":
    main()
