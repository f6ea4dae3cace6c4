"""Plot per-node dimensions from a `morpho analyze --format csv` file.

    morpho analyze --scenario C --format csv --out c.csv
    python docs/plot_report.py c.csv c.png

Needs matplotlib. For full-body CSVs one line is drawn per x1 value.
The CSV also loads directly in gnuplot (`set datafile separator ","`).
"""

import csv
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

COLUMNS = ["sym_dim", "evo_dim", "evo_base_dim", "morph_dim", "morph_base_dim"]


def load(path):
    rows = defaultdict(list)
    with open(path, newline="") as f:
        for r in csv.DictReader(f):
            rows[float(r["x1"])].append(r)
    return rows


def main(src, dst):
    rows = load(src)
    fig, axes = plt.subplots(len(COLUMNS), 1, sharex=True, figsize=(7, 2 * len(COLUMNS)))
    for ax, col in zip(axes, COLUMNS):
        for x1, rs in sorted(rows.items()):
            t = [float(r["t"]) for r in rs]
            y = [float(r[col]) if r[col] else float("nan") for r in rs]
            ax.step(t, y, where="mid", label=f"x1={x1:g}")
            jumps = [float(r["t"]) for r in rs if "jump" in r["flags"].split("|")]
            for tj in jumps:
                ax.axvline(tj, color="grey", lw=0.5, ls=":")
        ax.set_ylabel(col)
    axes[-1].set_xlabel("t")
    if len(rows) > 1:
        axes[0].legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(dst, dpi=120)


if __name__ == "__main__":
    if len(sys.argv) != 3:
        sys.exit("usage: plot_report.py REPORT.csv OUT.png")
    main(sys.argv[1], sys.argv[2])
