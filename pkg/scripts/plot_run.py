"""Render the plot-data files of one run directory (needs matplotlib).

    python scripts/plot_run.py out/ [--save figs/]
"""

import argparse
import csv
from pathlib import Path

import matplotlib.pyplot as plt


def read(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], [[float(v) for v in r] for r in rows[1:]]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("run_dir", type=Path)
    ap.add_argument("--save", type=Path)
    args = ap.parse_args()

    _, sum_rows = read(args.run_dir / "plot_sum_rate.csv")
    header, node_rows = read(args.run_dir / "plot_node_rates.csv")
    _, bars = read(args.run_dir / "plot_node_sinr_focus.csv")

    fig1, (top, bottom) = plt.subplots(2, 1, sharex=True, figsize=(8, 6))
    top.plot([r[0] for r in sum_rows], [r[1] / 1e6 for r in sum_rows])
    top.set_ylabel("sum rate (Mbps)")
    for k in range(1, len(header)):
        bottom.plot([r[0] for r in node_rows], [r[k] / 1e6 for r in node_rows], lw=0.8, label=f"node {k}")
    bottom.set_xlabel("slot")
    bottom.set_ylabel("rate (Mbps)")
    bottom.legend(ncol=5, fontsize="small")

    fig2, (left, right) = plt.subplots(1, 2, figsize=(10, 4))
    nodes = [int(r[0]) for r in bars]
    left.bar(nodes, [r[1] for r in bars])
    left.axhline(bars[0][3], color="k", ls="--", label="decode threshold")
    left.set_xlabel("node")
    left.set_ylabel("avg SINR (dB)")
    left.legend()
    right.bar(nodes, [100 * r[2] for r in bars])
    right.set_xlabel("node")
    right.set_ylabel("IRS focus (%)")

    if args.save:
        args.save.mkdir(parents=True, exist_ok=True)
        fig1.savefig(args.save / "rates_vs_slot.png", dpi=150)
        fig2.savefig(args.save / "sinr_focus.png", dpi=150)
    else:
        plt.show()


if __name__ == "__main__":
    main()
