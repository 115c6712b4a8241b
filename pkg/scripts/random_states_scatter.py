"""Final versus initial entropy for random qubit states under the erasure channel.

Writes a CSV of (S0, S1) pairs and, if matplotlib is installed, an SVG
scatter with the diagonal rho(p) curve overlaid.
"""
import argparse
import csv
from pathlib import Path

import numpy as np

from condaction import spinmodel as sm
from condaction.entropy import von_neumann_entropy
from condaction.instruments import apply_operation, total_operation
from condaction.samplers import random_density


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=Path("out"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    rng = np.random.default_rng(args.seed)
    op = total_operation(sm.erasure_instrument())
    pts = []
    for _ in range(args.samples):
        rho = random_density(2, rng)
        pts.append((von_neumann_entropy(rho), von_neumann_entropy(apply_operation(op, rho))))
    with (args.out / "scatter.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["S0", "S1"])
        w.writerows(pts)
    above = sum(s1 > s0 for s0, s1 in pts)
    print(f"{above}/{len(pts)} states gain entropy")

    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        return
    curve = sm.entropy_curve(sm.SpinBathConfig(), np.linspace(0, 1, 201))
    s0, s1 = zip(*pts)
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.scatter(s0, s1, s=1, alpha=0.3)
    ax.plot([c.S0 for c in curve], [c.S1 for c in curve], "r", lw=1, label="rho(p)")
    ax.plot([0, np.log(2)], [0, np.log(2)], "k--", lw=0.8)
    ax.set_xlabel("S0")
    ax.set_ylabel("S1")
    ax.legend()
    fig.savefig(args.out / "scatter.svg", metadata={"Date": None})


if __name__ == "__main__":
    main()
