#!/usr/bin/env python3
"""Render figure analogues from `cbo run` output.

Expects, in DIR, the files written by

    for s in 0 1 2; do
      cbo run --config configs/rastrigin.cfg --sigma $s --seed 1 \
        --diameter_tol 0 --max_steps 1000 \
        --out_csv DIR/sigma$s.csv --out_positions DIR/pos$s.csv
    done

and writes snapshots_sigma{0,1,2}.png (particles at t = 0, 1, 2, 10) and
diameter.png (log diameter against time for each sigma).
"""
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

SIGMAS = (0, 1, 2)
TIMES = (0.0, 1.0, 2.0, 10.0)


def snapshots(directory: Path, sigma: int) -> None:
    pos = pd.read_csv(directory / f"pos{sigma}.csv")
    fig, axes = plt.subplots(1, len(TIMES), figsize=(4 * len(TIMES), 4), sharex=True, sharey=True)
    for ax, t in zip(axes, TIMES):
        step = pos.loc[(pos["time"] - t).abs().idxmin(), "step"]
        frame = pos[pos["step"] == step]
        ax.scatter(frame["x_1"], frame["x_2"], s=8)
        ax.set_title(f"sigma = {sigma}, t = {t:g}")
        ax.set_xlim(-2, 2)
        ax.set_ylim(-2, 2)
    fig.tight_layout()
    fig.savefig(directory / f"snapshots_sigma{sigma}.png", dpi=100)
    plt.close(fig)


def diameters(directory: Path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    for sigma in SIGMAS:
        stats = pd.read_csv(directory / f"sigma{sigma}.csv")
        ax.plot(stats["time"], np.log(stats["diameter"]), label=f"sigma = {sigma}")
    ax.set_xlabel("t")
    ax.set_ylabel("log diameter")
    ax.legend()
    fig.tight_layout()
    fig.savefig(directory / "diameter.png", dpi=100)
    plt.close(fig)


def main() -> None:
    directory = Path(sys.argv[1] if len(sys.argv) > 1 else ".")
    for sigma in SIGMAS:
        snapshots(directory, sigma)
    diameters(directory)


if __name__ == "__main__":
    main()
