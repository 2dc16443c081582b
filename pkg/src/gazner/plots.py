"""Matplotlib figures for evaluation and benchmark reports.

Every function writes one PNG and returns its path. The Agg backend is
selected on import so this works without a display.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .evaluation import LD_BUCKETS, MetricsReport  # noqa: E402

_PRECISION_LABELS = {
    "P_O_star": r"$P_O^*$",
    "P_O": r"$P_O$",
    "P_A_star": r"$P_A^*$",
    "P_A": r"$P_A$",
}

_RC = {
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "savefig.dpi": 150,
}


def _bars(ax, groups: Sequence[str], series: Mapping[str, Sequence[float]]):
    n = max(1, len(series))
    width = 0.8 / n
    for i, (name, vals) in enumerate(series.items()):
        xs = [g + (i - (n - 1) / 2) * width for g in range(len(groups))]
        ax.bar(xs, vals, width, label=name)
    ax.set_xticks(range(len(groups)))
    ax.set_xticklabels(groups)
    if len(series) > 1:
        ax.legend(frameon=False)


def _pct(rate):
    return 0.0 if rate is None else 100.0 * rate


def plot_recall_by_ld(reports: Mapping[str, MetricsReport], path) -> Path:
    path = Path(path)
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5, 3))
        series = {
            name: [_pct(r.recall_by_ld[b].to_json()["rate"]) for b in LD_BUCKETS]
            for name, r in reports.items()
        }
        _bars(ax, [f"LD={b}" for b in LD_BUCKETS], series)
        ax.set_ylabel("recall [%]")
        ax.set_ylim(0, 105)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return path


def plot_precision(reports: Mapping[str, MetricsReport], path) -> Path:
    path = Path(path)
    order = ("P_O_star", "P_O", "P_A_star", "P_A")
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5, 3))
        series = {
            name: [_pct(r.precision[k].to_json()["rate"]) for k in order]
            for name, r in reports.items()
        }
        _bars(ax, [_PRECISION_LABELS[k] for k in order], series)
        ax.set_ylabel("precision [%]")
        ax.set_ylim(0, 105)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return path


def plot_throughput(results: Mapping[str, Mapping], path) -> Path:
    """Bar chart of ``chars_per_ms`` per recognizer."""
    path = Path(path)
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(4, 3))
        names = list(results)
        ax.bar(names, [results[n].get("chars_per_ms") or 0.0 for n in names], 0.6)
        ax.set_ylabel("characters / ms")
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return path


def plot_linearity(sizes: Sequence[int], wall_ms: Mapping[str, Sequence[float]], path) -> Path:
    """Log-log wall time against input size, with an ideal O(n) guide."""
    path = Path(path)
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(4.5, 3))
        for name, ts in wall_ms.items():
            ax.loglog(sizes, ts, "o-", label=name)
            if ts and sizes:
                ax.loglog(sizes, [ts[0] * s / sizes[0] for s in sizes], ":",
                          color="grey", linewidth=0.8)
        ax.set_xlabel("input characters")
        ax.set_ylabel("wall time [ms]")
        ax.legend(frameon=False)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return path
