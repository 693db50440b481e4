"""Plot a `copent sweep` CSV: analytic MI (black), KSG (red), copula entropy (blue).

    copent sweep --output sweep.csv
    python3 docs/plot_sweep.py sweep.csv sweep.png
"""
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def main(src, dst):
    df = pd.read_csv(src)
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot(df.rho, df.analytic_mi, "k-", label="analytic")
    ax.errorbar(df.rho, df.ksg_mean, yerr=df.ksg_sd, fmt="r-o", ms=3, capsize=2, label="KSG")
    ax.errorbar(df.rho, df.copent_mean, yerr=df.copent_sd, fmt="b-s", ms=3, capsize=2, label="copula entropy")
    ax.set_xlabel("rho")
    ax.set_ylabel("mutual information")
    ax.legend()
    fig.tight_layout()
    fig.savefig(dst, dpi=150)


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2] if len(sys.argv) > 2 else "sweep.png")
