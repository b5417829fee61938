"""Bar-chart figures written next to the JSON and text reports."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .adherence import AdherenceReport  # noqa: E402
from .evaluation import METRICS, EvalReport, ModeComparison  # noqa: E402

# keep PNG bytes independent of the installed matplotlib version
_PNG_METADATA = {"Software": None}


def _save(fig, path) -> None:
    fig.tight_layout()
    fig.savefig(path, format="png", dpi=100, metadata=_PNG_METADATA)
    plt.close(fig)


def plot_eval_report(report: EvalReport, path) -> None:
    results = report.evaluated()
    names = list(results)
    x = np.arange(len(names))
    width = 0.27
    fig, ax = plt.subplots(figsize=(max(6.0, 1.1 * len(names) + 2), 4.0))
    for j, metric in enumerate(METRICS):
        ax.bar(x + (j - 1) * width, [getattr(results[n], metric) for n in names], width, label=metric)
    ax.set_xticks(x)
    ax.set_xticklabels(names, rotation=30, ha="right")
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("score")
    fp = report.fingerprint
    ax.set_title(f"{fp.get('algorithm')} / {fp.get('feature_mode')}, k={fp.get('k')}, seed={fp.get('seed')}")
    ax.legend(loc="lower right", fontsize="small")
    _save(fig, path)


def plot_comparison(comparison: ModeComparison, path) -> None:
    names = list(comparison.per_category) + ["macro"]
    deltas = [comparison.per_category[n]["f1"] for n in names[:-1]] + [comparison.macro["f1"]]
    fig, ax = plt.subplots(figsize=(max(6.0, 1.0 * len(names) + 2), 4.0))
    colors = ["tab:green" if d >= 0 else "tab:red" for d in deltas]
    ax.bar(np.arange(len(names)), deltas, color=colors)
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.set_xticks(np.arange(len(names)))
    ax.set_xticklabels(names, rotation=30, ha="right")
    ax.set_ylabel("F1 delta")
    ax.set_title(f"({comparison.label_b}) - ({comparison.label_a})")
    _save(fig, path)


def plot_adherence(report: AdherenceReport, path) -> None:
    agg = report.aggregate
    names = ["comment coverage"] + list(agg)
    values = [report.comment_coverage] + list(agg.values())
    fig, ax = plt.subplots(figsize=(max(5.0, 1.2 * len(names) + 2), 3.6))
    ax.barh(np.arange(len(names)), values, color=["tab:gray"] + ["tab:blue"] * len(agg))
    ax.set_yticks(np.arange(len(names)))
    ax.set_yticklabels(names)
    ax.invert_yaxis()
    ax.set_xlim(0, 1.0)
    ax.set_xlabel("fraction of classes")
    ax.set_title(report.guideline.name)
    _save(fig, path)
