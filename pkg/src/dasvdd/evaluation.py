"""Ranking metrics over anomaly scores: AUC, ROC curve, extreme samples.

Scores are interpreted as "higher means more anomalous". AUC follows the
Mann-Whitney convention: the probability that a random anomaly outscores a
random normal, with ties counted half. The ROC sweep uses the matching
"predict anomaly when score >= threshold" rule, so the trapezoidal area
under the curve reproduces the pair-counting value exactly up to float
rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ScoredSample",
    "RocCurve",
    "ExtremeSet",
    "scored_samples",
    "auc",
    "roc_curve",
    "extremes",
]


@dataclass(frozen=True)
class ScoredSample:
    """One scored test item: position in the dataset, score, 0/1 label."""

    index: int
    score: float
    label: int

    def __post_init__(self) -> None:
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 (normal) or 1 (anomaly), got {self.label}")
        if not math.isfinite(self.score):
            raise ValueError(f"score must be finite, got {self.score}")


def scored_samples(scores, labels) -> list[ScoredSample]:
    """Pair score and label vectors into ScoredSample records by position."""
    score_arr = np.asarray(scores, dtype=np.float64)
    label_arr = np.asarray(labels)
    if score_arr.ndim != 1 or label_arr.shape != score_arr.shape:
        raise ValueError("scores and labels must be 1-D and equally long")
    return [
        ScoredSample(index=i, score=float(s), label=int(l))
        for i, (s, l) in enumerate(zip(score_arr, label_arr))
    ]


def _split_scores(samples: list[ScoredSample]) -> tuple[np.ndarray, np.ndarray]:
    scores = np.array([s.score for s in samples], dtype=np.float64)
    labels = np.array([s.label for s in samples], dtype=np.int64)
    n_anom = int(labels.sum())
    if n_anom == 0 or n_anom == len(samples):
        raise ValueError("need at least one normal and one anomaly")
    return scores, labels


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks with tied values sharing their average rank."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def auc(samples: list[ScoredSample]) -> float:
    """Probability a random anomaly outscores a random normal, ties half.

    Computed through average ranks, which is algebraically identical to
    counting all (anomaly, normal) pairs.
    """
    scores, labels = _split_scores(samples)
    ranks = _average_ranks(scores)
    n_anom = int(labels.sum())
    n_norm = len(samples) - n_anom
    rank_sum = float(ranks[labels == 1].sum())
    u_stat = rank_sum - 0.5 * n_anom * (n_anom + 1)
    return u_stat / (n_anom * n_norm)


@dataclass
class RocCurve:
    """ROC points ordered from the strictest threshold to the loosest.

    The first point is (0, 0) at threshold +inf; the last is (1, 1) at the
    minimum score, where every sample is flagged.
    """

    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray

    def __post_init__(self) -> None:
        self.fpr = np.asarray(self.fpr, dtype=np.float64)
        self.tpr = np.asarray(self.tpr, dtype=np.float64)
        self.thresholds = np.asarray(self.thresholds, dtype=np.float64)
        if not (self.fpr.shape == self.tpr.shape == self.thresholds.shape):
            raise ValueError("fpr, tpr, thresholds must have identical shapes")
        if len(self.fpr) < 2:
            raise ValueError("a curve needs at least two points")
        for name, arr in (("fpr", self.fpr), ("tpr", self.tpr)):
            if np.any(np.diff(arr) < 0):
                raise ValueError(f"{name} must be non-decreasing along the curve")
        if self.fpr[0] != 0.0 or self.tpr[0] != 0.0:
            raise ValueError("curve must start at (0, 0)")
        if self.fpr[-1] != 1.0 or self.tpr[-1] != 1.0:
            raise ValueError("curve must end at (1, 1)")

    def trapezoid_area(self) -> float:
        widths = np.diff(self.fpr)
        heights = 0.5 * (self.tpr[1:] + self.tpr[:-1])
        return float(np.sum(widths * heights))


def roc_curve(samples: list[ScoredSample]) -> RocCurve:
    """Sweep thresholds over the distinct scores, descending.

    Each distinct score value contributes one point (duplicates collapse);
    a sample is flagged when its score is >= the threshold.
    """
    scores, labels = _split_scores(samples)
    n_anom = int(labels.sum())
    n_norm = len(samples) - n_anom

    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_labels = labels[order]
    cum_tp = np.cumsum(sorted_labels)
    cum_fp = np.cumsum(1 - sorted_labels)
    # last position of each run of equal scores = counts at that threshold
    boundary = np.nonzero(np.diff(sorted_scores))[0]
    idx = np.append(boundary, len(sorted_scores) - 1)

    fpr = np.concatenate([[0.0], cum_fp[idx] / n_norm])
    tpr = np.concatenate([[0.0], cum_tp[idx] / n_anom])
    thresholds = np.concatenate([[np.inf], sorted_scores[idx]])
    return RocCurve(fpr=fpr, tpr=tpr, thresholds=thresholds)


@dataclass
class ExtremeSet:
    """The k most normal-looking and k most anomalous-looking samples."""

    lowest: list[ScoredSample]
    highest: list[ScoredSample]
    lowest_rows: np.ndarray
    highest_rows: np.ndarray


def extremes(samples: list[ScoredSample], data, k: int) -> ExtremeSet:
    """Feature rows of the k smallest and k largest scores.

    Ties break toward the smaller index on both ends. ``data`` is indexed by
    each sample's ``index`` field, so ``samples`` may be any subset.
    """
    if not (1 <= k <= len(samples)):
        raise ValueError(f"k must be in [1, {len(samples)}], got {k}")
    data_arr = np.asarray(data, dtype=np.float64)
    if data_arr.ndim != 2:
        raise ValueError("data must be 2-D (samples x features)")
    lowest = sorted(samples, key=lambda s: (s.score, s.index))[:k]
    highest = sorted(samples, key=lambda s: (-s.score, s.index))[:k]
    return ExtremeSet(
        lowest=lowest,
        highest=highest,
        lowest_rows=data_arr[[s.index for s in lowest]],
        highest_rows=data_arr[[s.index for s in highest]],
    )
