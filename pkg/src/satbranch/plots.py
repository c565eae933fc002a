"""Matplotlib figures for the experiment reports.

Rendered with the Agg backend straight to files, next to the CSV output.
Figure content is a pure function of the result rows, so the PNG bytes
are reproducible.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def save_branching_impact_figure(
    per_instance_means: Mapping[str, Sequence[float]], path: str | Path
) -> None:
    """Sorted per-variable mean propagations, one line per instance."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for instance_id in sorted(per_instance_means):
        means = sorted(per_instance_means[instance_id])
        ax.plot(range(1, len(means) + 1), means, marker=".", linewidth=1, label=instance_id)
    ax.set_xlabel("sampled variables, cheapest first")
    ax.set_ylabel("mean propagations")
    ax.set_yscale("log")
    ax.set_title("spread of first-variable cost")
    if len(per_instance_means) <= 10:
        ax.legend(fontsize=6)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_evaluation_figure(
    reductions: Sequence[float], spearmans: Sequence[float], path: str | Path
) -> None:
    """Histogram of propagation reductions, plus Spearman if available."""
    ncols = 2 if spearmans else 1
    fig, axes = plt.subplots(1, ncols, figsize=(4.5 * ncols, 3.5), squeeze=False)
    ax = axes[0][0]
    ax.hist(reductions, bins=30, color="tab:blue", alpha=0.8)
    ax.axvline(0.0, color="black", linewidth=1)
    if reductions:
        mean = sum(reductions) / len(reductions)
        ax.axvline(mean, color="tab:red", linewidth=1.5, label=f"mean {mean:.3f}")
        ax.legend(fontsize=8)
    ax.set_xlabel("propagation reduction vs default order")
    ax.set_ylabel("instances")
    if spearmans:
        ax2 = axes[0][1]
        ax2.hist(spearmans, bins=30, color="tab:green", alpha=0.8)
        mean_s = sum(spearmans) / len(spearmans)
        ax2.axvline(mean_s, color="tab:red", linewidth=1.5, label=f"mean {mean_s:.3f}")
        ax2.legend(fontsize=8)
        ax2.set_xlabel("Spearman vs label order")
        ax2.set_ylabel("instances")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
