"""Full-spectrum distillable-entropy scan on L x k lattices, resolved by lattice momentum."""

import argparse
import csv
import dataclasses
import json
import time

from scarlab.scan import geometry_scan


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", nargs="+", default=["4x4", "5x3"], help="LxK pairs")
    ap.add_argument("--g", type=float, default=0.9)
    ap.add_argument("--out", default="results/geometry_scan")
    args = ap.parse_args()

    for size in args.sizes:
        L, k = (int(x) for x in size.split("x"))
        t0 = time.time()
        records, summary = geometry_scan(L, k, args.g)
        with open(f"{args.out}_{size}.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["energy", "kx", "ky", "S_dist", "S_symm", "S_total", "degeneracy"])
            for r in records:
                w.writerow([repr(r.energy), r.kx, r.ky, repr(r.S_dist), repr(r.S_symm), repr(r.S_total), r.degeneracy])
        report = dataclasses.asdict(summary) | {"passed": summary.passed, "seconds": round(time.time() - t0, 1)}
        print(json.dumps(report))


if __name__ == "__main__":
    main()
