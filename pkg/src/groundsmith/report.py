"""Metrics reporting: delimited output plus rendered figures.

The evaluation report is a CSV of per-class accuracies, a JSON error
histogram, and a bar chart of CQ/LTL accuracy per task class written next
to the CSV.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .corpus import Metrics

CSV_COLUMNS = ("split", "task_class", "total", "cq_correct", "ltl_correct", "accuracy")


def write_metrics_csv(metrics: Metrics, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for (split, task_class), stats in sorted(metrics.per_class.items()):
            writer.writerow([split, task_class, stats.total, stats.cq_correct,
                             stats.ltl_correct, f"{stats.accuracy:.6f}"])
        for split in metrics.splits:
            agg = metrics.overall(split)
            writer.writerow([split, "overall", agg.total, agg.cq_correct,
                             agg.ltl_correct, f"{agg.accuracy:.6f}"])


def write_error_histogram(metrics: Metrics, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(dict(sorted(metrics.errors.items())), fh, indent=2, sort_keys=True)
        fh.write("\n")


def render_accuracy_figure(metrics: Metrics, path: str | Path) -> None:
    """Grouped bars of contextual-query and LTL accuracy per task class."""
    rows = sorted(metrics.per_class.items())
    labels = [f"{split}\n{task_class}" for (split, task_class), _ in rows]
    cq_acc = [stats.cq_accuracy for _, stats in rows]
    ltl_acc = [stats.accuracy for _, stats in rows]

    x = range(len(rows))
    width = 0.38
    fig, ax = plt.subplots(figsize=(max(6.0, 1.1 * len(rows)), 4.0))
    ax.bar([i - width / 2 for i in x], cq_acc, width, label="contextual query")
    ax.bar([i + width / 2 for i in x], ltl_acc, width, label="grounded LTL")
    ax.set_xticks(list(x))
    ax.set_xticklabels(labels, fontsize=8)
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel("accuracy")
    ax.set_title("Task specification accuracy by task class")
    ax.legend(loc="lower right")
    ax.grid(axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def default_figure_path(metrics_path: str | Path) -> Path:
    p = Path(metrics_path)
    return p.with_name(p.stem + "_accuracy.png")


def default_errors_path(metrics_path: str | Path) -> Path:
    p = Path(metrics_path)
    return p.with_name(p.stem + "_errors.json")
