"""Figures written next to the experiment CSVs (non-interactive backend)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_LABELS = {"noise_sigma": "relative noise level", "num_matrices": "number of matrices"}


def residual_figure(summary, key: str, path: str) -> str:
    """Median and worst residual against ``key`` on log axes where sensible."""
    x = np.array([r[key] for r in summary], dtype=float)
    med = np.array([r["median_residual"] for r in summary], dtype=float)
    worst = np.array([r["max_residual"] for r in summary], dtype=float)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(x, med, "o-", label="median")
    ax.plot(x, worst, "s--", alpha=0.7, label="max")
    if key == "noise_sigma" and np.all(x > 0):
        ax.set_xscale("log")
    if np.all(med[np.isfinite(med)] > 0):
        ax.set_yscale("log")
    ax.set_xlabel(_LABELS.get(key, key))
    ax.set_ylabel("residual")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def magnitude_map_figure(tmap, path: str) -> str:
    v = tmap.shift_grid.points
    u = tmap.freq_grid.points
    fig, ax = plt.subplots(figsize=(5, 4))
    mesh = ax.pcolormesh(v, u, np.abs(tmap.values).T, shading="auto")
    fig.colorbar(mesh, ax=ax, label="|V|")
    ax.set_xlabel("shift v")
    ax.set_ylabel("u")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
