"""Phase portrait from `triclock portrait --format csv`.

    triclock portrait --format csv --out portrait.csv
    python scripts/plot_portrait.py portrait.csv portrait.png
"""
import sys

import matplotlib.pyplot as plt
import pandas as pd

MARKERS = {"source": ("o", "tab:red"), "saddle": ("s", "tab:orange"), "sink": ("*", "tab:green")}


def main(src, dst):
    df = pd.read_csv(src)
    fig, ax = plt.subplots(figsize=(6, 6))
    for kind, rows in df.groupby("kind", sort=False):
        if kind in MARKERS:
            marker, color = MARKERS[kind]
            ax.scatter(rows.x, rows.y, marker=marker, color=color, s=60, zorder=3, label=kind)
        elif kind.startswith("eta"):
            ax.plot(rows.x, rows.y, color="black", lw=1.2)
        elif kind == "gamma":
            ax.plot(rows.x, rows.y, color="tab:blue", ls="--", lw=1, label="gamma")
        else:
            ax.plot(rows.x, rows.y, color="grey", lw=0.6, alpha=0.7)
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(dst, dpi=150)


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2] if len(sys.argv) > 2 else "portrait.png")
