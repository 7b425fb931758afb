"""Figure rendering for the report-producing CLI paths.

Figures are written to files next to the delimited output; nothing here is
needed by the numerical code paths.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from scipy import stats  # noqa: E402

from .simharness import DensityRow, RmseSummary  # noqa: E402

_STYLE = {"local": dict(linestyle="-", color="tab:blue"),
          "optimal": dict(linestyle=":", color="tab:red")}


def save_density_plot(rows: Iterable[DensityRow], path: str,
                      true_values: Sequence[float] = ()):
    """Smoothed density of the pooled estimates per method, with the true
    possible effects as vertical lines."""
    rows = list(rows)
    fig, ax = plt.subplots(figsize=(7, 4))
    for method in ("local", "optimal"):
        values = np.array([r.estimate for r in rows if r.method == method])
        if values.size < 2 or np.allclose(values, values[0]):
            continue
        kde = stats.gaussian_kde(values)
        lo, hi = values.min(), values.max()
        pad = 0.1 * (hi - lo or 1.0)
        grid = np.linspace(lo - pad, hi + pad, 512)
        ax.plot(grid, kde(grid), label=f"{method} IDA", **_STYLE[method])
    for v in true_values:
        ax.axvline(v, color="grey", linewidth=0.8)
    ax.set_xlabel("estimated possible causal effect")
    ax.set_ylabel("density")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_rmse_plot(summary: RmseSummary, path: str, title: str = ""):
    """Violin of the per-replication MSE ratios with geometric mean (dot)
    and median (plus) markers."""
    ratios = np.array([r.rmse for r in summary.records])
    fig, ax = plt.subplots(figsize=(4, 5))
    if ratios.size:
        ax.violinplot(np.log10(ratios), showextrema=False)
        ax.scatter([1], [np.log10(summary.geometric_mean)], marker="o",
                   color="black", zorder=3, label="geometric mean")
        ax.scatter([1], [np.log10(summary.median)], marker="+", s=80,
                   color="black", zorder=3, label="median")
    ax.axhline(0.0, color="grey", linewidth=0.8)
    ax.set_ylabel("log10 relative MSE (optimal / local)")
    ax.set_xticks([])
    if title:
        ax.set_title(title)
    ax.legend(loc="upper right", fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
