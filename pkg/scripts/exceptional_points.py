"""Locate exceptional points of the emission block along the pump axis.

For each N, prints where the two slowest modes coalesce, the eigenvector
condition number next to each point, and the large-pump cumulant estimate
for comparison.
"""
import argparse

import numpy as np

from partialpump import ModelSpec
from partialpump.spectrum import (cumulant_merging_pump, emission_eigenvalues,
                                  exceptional_point_condition, find_exceptional_points)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=int, nargs="+", default=[1, 2, 5, 10, 20])
    ap.add_argument("--w-max", type=float, default=None, help="default 4 N + 10")
    ap.add_argument("--samples", type=int, default=300)
    ap.add_argument("--phi", type=float, default=0.0)
    args = ap.parse_args()
    for N in args.N:
        spec = ModelSpec("toy", N, 1.0, phi=args.phi)
        w_max = args.w_max or 4 * N + 10
        eps = find_exceptional_points(spec, 1e-3, w_max, args.samples, tol=1e-4)
        print(f"N={N}: cumulant estimate {cumulant_merging_pump(N):.4g}")
        for w in eps:
            ev = emission_eigenvalues(spec.with_(w=w))[:2]
            cond = exceptional_point_condition(spec, w)
            print(f"  w*={w:.6g}  slowest pair {np.round(ev, 5)}  cond {cond:.3g}")


if __name__ == "__main__":
    main()
