"""Figure rendering for the report command.

Uses the Agg backend so rendering works headless; every helper writes a PNG
to the given path and returns that path. Data comes in as plain arrays or
name-keyed dicts, already loaded from the delimited run outputs.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["save_loss_figure", "save_roc_figure", "save_sweep_figure"]


def save_loss_figure(histories: dict[str, np.ndarray], path) -> Path:
    """Training-loss curves; rows of each history are (epoch, total, recon, svdd).

    A single history is split into its components; several histories are
    overlaid as total-loss curves.
    """
    if not histories:
        raise ValueError("no loss histories to plot")
    out = Path(path)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    if len(histories) == 1:
        ((name, rows),) = histories.items()
        rows = np.atleast_2d(rows)
        ax.plot(rows[:, 0], rows[:, 1], label="total")
        ax.plot(rows[:, 0], rows[:, 2], label="reconstruction")
        ax.plot(rows[:, 0], rows[:, 3], label="hypersphere")
        ax.set_title(name)
    else:
        for name, rows in sorted(histories.items()):
            rows = np.atleast_2d(rows)
            ax.plot(rows[:, 0], rows[:, 1], label=name)
    ax.set_xlabel("epoch")
    ax.set_ylabel("mean batch loss")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out


def save_roc_figure(curves: dict[str, tuple[np.ndarray, np.ndarray]], path) -> Path:
    """ROC curves (fpr, tpr) per name, with the chance diagonal for scale."""
    if not curves:
        raise ValueError("no curves to plot")
    out = Path(path)
    fig, ax = plt.subplots(figsize=(5.2, 5.0))
    for name, (fpr, tpr) in sorted(curves.items()):
        ax.plot(fpr, tpr, label=name)
    ax.plot([0, 1], [0, 1], linestyle="--", color="gray", linewidth=1)
    ax.set_xlabel("false positive rate")
    ax.set_ylabel("true positive rate")
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1.02)
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out


def save_sweep_figure(param_name: str, values, means, stds, path) -> Path:
    """Mean AUC with one-std error bars over a swept hyperparameter."""
    values = np.asarray(values, dtype=np.float64)
    means = np.asarray(means, dtype=np.float64)
    stds = np.asarray(stds, dtype=np.float64)
    if len(values) == 0:
        raise ValueError("no sweep points to plot")
    out = Path(path)
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    ax.errorbar(values, means, yerr=stds, marker="o", capsize=3)
    if np.all(values > 0) and values.max() / values.min() >= 100:
        ax.set_xscale("log")
    ax.set_xlabel(param_name)
    ax.set_ylabel("AUC")
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out
