"""Linewidth, g2 and intensity against the number of unpumped spins.

At fixed pump (``--w``) or at pump proportional to N (``--w-per-N``).
Prints a table and writes ``scaling.csv`` and ``scaling.svg``.
"""
import argparse
import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from partialpump import ModelSpec
from partialpump.observables import observables
from partialpump.spectrum import analyze_emission


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=int, nargs="+", default=[5, 10, 20, 40, 80])
    g = ap.add_mutually_exclusive_group()
    g.add_argument("--w", type=float, default=1.0)
    g.add_argument("--w-per-N", type=float)
    ap.add_argument("--phi", type=float, default=0.0)
    ap.add_argument("--basis", choices=["dicke", "hp"], default="dicke")
    ap.add_argument("--n-cut", type=int, default=8)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()
    rows = []
    for N in args.N:
        w = args.w_per_N * N if args.w_per_N else args.w
        if args.basis == "hp":
            spec = ModelSpec("hp_toy", N, w, phi=args.phi, n_cut=args.n_cut)
        else:
            spec = ModelSpec("toy", N, w, phi=args.phi)
        obs = observables(spec)
        sr = analyze_emission(spec).spectrum
        rows.append({"N": N, "w": w, "intensity": obs.intensity, "g2": obs.g2, "linewidth": sr.linewidth,
                     "peak_shift": sr.peak_shift, "method": sr.method})
        print("  ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}" for k, v in rows[-1].items()))
    args.out.mkdir(parents=True, exist_ok=True)
    with open(args.out / "scaling.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)
    fig, axes = plt.subplots(1, 3, figsize=(11, 3.2))
    Ns = [r["N"] for r in rows]
    for ax, key in zip(axes, ("linewidth", "g2", "intensity")):
        ax.loglog(Ns, [r[key] for r in rows], "o-")
        ax.set_xlabel("N")
        ax.set_ylabel(key)
    fig.tight_layout()
    fig.savefig(args.out / "scaling.svg", metadata={"Date": None})


if __name__ == "__main__":
    main()
