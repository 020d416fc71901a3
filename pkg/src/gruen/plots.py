"""Report figures: score-versus-judgment distributions rendered to files.

The report path emits a delimited pair file plus a rendered figure: a
scatter of (human score, metric score) with a least-squares trend line and
the per-bin mean overlay.
"""

from __future__ import annotations

from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

# Group by distinct value for rating-scale judgments; fall back to
# equal-width bins for continuous ones.
_DISTINCT_BIN_LIMIT = 16
_FALLBACK_BINS = 10


@dataclass(frozen=True)
class BinSummary:
    low: float
    high: float
    mean_metric: float
    count: int


def make_bins(human: list[float], metric: list[float]) -> list[BinSummary]:
    """Mean metric per human-score bin; bins with no members are omitted."""
    if not human:
        return []
    distinct = sorted(set(human))
    out: list[BinSummary] = []
    if len(distinct) <= _DISTINCT_BIN_LIMIT:
        for value in distinct:
            members = [m for h, m in zip(human, metric) if h == value]
            out.append(
                BinSummary(value, value, sum(members) / len(members), len(members))
            )
        return out
    edges = np.linspace(min(human), max(human), _FALLBACK_BINS + 1)
    for k in range(_FALLBACK_BINS):
        low, high = float(edges[k]), float(edges[k + 1])
        members = [
            m
            for h, m in zip(human, metric)
            if (low <= h < high) or (k == _FALLBACK_BINS - 1 and h == high)
        ]
        if members:
            out.append(BinSummary(low, high, sum(members) / len(members), len(members)))
    return out


def render_pairs_figure(
    human: list[float],
    metric: list[float],
    bins: list[BinSummary],
    path: str,
    xlabel: str = "human score",
    ylabel: str = "metric score",
) -> None:
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    ax.scatter(human, metric, s=12, alpha=0.5, label="instances")
    if len(set(human)) > 1:
        slope, intercept = np.polyfit(human, metric, 1)
        xs = np.array([min(human), max(human)])
        ax.plot(xs, slope * xs + intercept, linestyle=":", color="black", label="trend")
    if bins:
        centers = [(b.low + b.high) / 2.0 for b in bins]
        ax.plot(
            centers,
            [b.mean_metric for b in bins],
            marker="o",
            color="tab:red",
            label="bin mean",
        )
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
