"""V and its orbital derivative along one orbit from `triclock iterate --format csv`.

    triclock iterate --x0 0.4 --y0 0.3 --n 300 --format csv --out orbit.csv
    python scripts/plot_orbit.py orbit.csv orbit.png
"""
import sys

import matplotlib.pyplot as plt
import pandas as pd


def main(src, dst):
    df = pd.read_csv(src)
    fig, (left, right) = plt.subplots(1, 2, figsize=(10, 4))
    left.plot(df.x, df.y, ".-", ms=3, lw=0.5)
    left.plot([3.141592653589793], [3.141592653589793], "g*", ms=12)
    left.set_xlabel("x")
    left.set_ylabel("y")
    left.set_aspect("equal")
    right.semilogy(df.n, df.V, label="V")
    right.semilogy(df.n, -df.Vdot.clip(upper=-1e-300), label="-Vdot")
    right.set_xlabel("n")
    right.legend()
    fig.tight_layout()
    fig.savefig(dst, dpi=150)


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2] if len(sys.argv) > 2 else "orbit.png")
