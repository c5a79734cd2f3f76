#!/usr/bin/env python3
"""Plot -log P / M(u;T) against u from the sweep.csv written by `mdx sweep`."""

import argparse
import csv
import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def read_rows(path):
    with open(path, newline="") as f:
        return [r for r in csv.DictReader(f) if r["ratio"]]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv", help="sweep.csv")
    ap.add_argument("-o", "--output", default="sweep.png")
    args = ap.parse_args()

    rows = read_rows(args.csv)
    if not rows:
        raise SystemExit("no rows with p_hat > 0")
    u = [float(r["u"]) for r in rows]
    ratio = [float(r["ratio"]) for r in rows]
    # Error bars from the p_hat interval, mapped through -log.
    lo, hi = [], []
    for r, q in zip(rows, ratio):
        p, hw, m = float(r["p_hat"]), float(r["half_width"]), float(r["m_of_u_T"])
        upper = -math.log(max(p - hw, 1e-300)) / m
        lower = -math.log(p + hw) / m
        lo.append(q - lower)
        hi.append(upper - q)

    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.errorbar(u, ratio, yerr=[lo, hi], marker="o", capsize=3)
    ax.axhline(1.0, color="grey", linestyle="--", linewidth=1)
    ax.set_xlabel("u")
    ax.set_ylabel("-log p_hat / M(u;T)")
    fig.tight_layout()
    fig.savefig(args.output, dpi=150)


if __name__ == "__main__":
    main()
