#!/usr/bin/env python3
"""Render monitored-integral drift curves from a trajectory CSV.

Usage: liftlab integrate --spec sys.json --initial ... --output traj.csv
       python scripts/plot_drift.py traj.csv [drift.png]
"""
import csv
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def main() -> None:
    if len(sys.argv) < 2:
        sys.exit(__doc__)
    path = sys.argv[1]
    out = sys.argv[2] if len(sys.argv) > 2 else "drift.png"
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        sys.exit("empty trajectory")
    t = [float(r["t"]) for r in rows]
    phase_cols = {c for c in rows[0] if c == "t" or c[0] in "qp" and c[1:].isdigit()}
    monitors = [c for c in rows[0] if c not in phase_cols]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    for name in monitors:
        series = [float(r[name]) for r in rows]
        base = series[0]
        scale = max(abs(base), 1e-12)
        ax.plot(t, [abs(v - base) / scale for v in series], label=name, lw=0.8)
    ax.set_yscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel("relative drift")
    ax.legend(loc="best", fontsize=8)
    ax.set_title(path)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
