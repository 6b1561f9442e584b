"""Figure rendering for gap scans.

Renders the scanned grid next to the CSV so the positivity of the
cost-minus-distillable gap can be eyeballed directly. One or two grid
axes are supported (line plot / heat map).
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def render_gap_scan(axis_names, rows, path) -> None:
    """Render scan rows (each ``axes... , gap``) to an image file."""
    rows = np.asarray(rows, dtype=float)
    if rows.ndim != 2 or rows.shape[1] != len(axis_names) + 1:
        raise ValueError("each row must hold one value per axis plus the gap")
    n_axes = len(axis_names)
    fig, ax = plt.subplots(figsize=(5.4, 4.0))
    if n_axes == 1:
        ax.plot(rows[:, 0], rows[:, 1], marker="o", ms=3, lw=1.2)
        ax.set_xlabel(axis_names[0])
        ax.set_ylabel("gap (ebits)")
        ax.axhline(0.0, color="0.6", lw=0.8)
    elif n_axes == 2:
        xs = np.unique(rows[:, 0])
        ys = np.unique(rows[:, 1])
        grid = np.full((ys.size, xs.size), np.nan)
        xi = {v: i for i, v in enumerate(xs)}
        yi = {v: i for i, v in enumerate(ys)}
        for x, y, g in rows:
            grid[yi[y], xi[x]] = g
        mesh = ax.pcolormesh(xs, ys, grid, shading="nearest", cmap="viridis")
        fig.colorbar(mesh, ax=ax, label="gap (ebits)")
        ax.set_xlabel(axis_names[0])
        ax.set_ylabel(axis_names[1])
    else:
        plt.close(fig)
        raise ValueError(f"plotting supports 1 or 2 grid axes, got {n_axes}")
    ax.set_title("cost minus distillable entanglement")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
