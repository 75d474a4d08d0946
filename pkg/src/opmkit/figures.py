"""Figure rendering for evaluation reports."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .metrics import METRIC_COLUMNS, MetricReport

_BAR_METRICS = ("loose", "strict", "rouge1", "rouge2", "rougeL", "t_f1")


def render_report_figures(report: MetricReport, out_dir: str | Path,
                          stem: str = "report") -> list[Path]:
    """Write per-item and aggregate score charts; returns the file paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []

    ids = [str(item.id) for item in report.items]
    if ids:
        fig, ax = plt.subplots(figsize=(max(6.0, 1.2 * len(ids)), 4.0))
        width = 0.8 / len(_BAR_METRICS)
        for j, metric in enumerate(_BAR_METRICS):
            values = [getattr(item, metric) for item in report.items]
            positions = [i + (j - len(_BAR_METRICS) / 2) * width for i in range(len(ids))]
            ax.bar(positions, values, width=width, label=metric)
        ax.set_xticks(range(len(ids)))
        ax.set_xticklabels(ids)
        ax.set_xlabel("item id")
        ax.set_ylabel("score")
        ax.set_ylim(0, 1.05)
        ax.set_title("Per-item scores")
        ax.legend(fontsize=8, ncol=3)
        fig.tight_layout()
        path = out_dir / f"{stem}_per_item.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        paths.append(path)

    names = [m for m in METRIC_COLUMNS if m in report.aggregate]
    if names:
        means = [report.aggregate[m][0] for m in names]
        stds = [report.aggregate[m][1] for m in names]
        fig, ax = plt.subplots(figsize=(7.0, 4.0))
        ax.bar(range(len(names)), means, yerr=stds, capsize=4, color="#4878a8")
        ax.set_xticks(range(len(names)))
        ax.set_xticklabels(names, rotation=30, ha="right")
        ax.set_ylabel("mean score")
        ax.set_ylim(0, 1.05)
        ax.set_title("Aggregate scores (mean and sample std)")
        fig.tight_layout()
        path = out_dir / f"{stem}_aggregate.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        paths.append(path)

    return paths
