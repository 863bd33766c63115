"""Classification and regression evaluation statistics.

AUC is the Mann-Whitney rank statistic with midranks for ties; the
threshold statistics use 0.5 by default since the source tables never
state one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class MetricError(Exception):
    pass


class UndefinedMetricError(MetricError):
    pass


@dataclass(frozen=True)
class ClassificationReport:
    auc: float
    accuracy: float
    precision: float
    recall: float
    f1: float
    threshold: float
    n: int
    precision_defined: bool = True


@dataclass(frozen=True)
class RegressionReport:
    mse: float
    r2: float
    adj_r2: float
    n: int
    p: int


def _midranks(x: np.ndarray) -> np.ndarray:
    """Average ranks (1-based) with ties sharing their midrank."""
    x = np.asarray(x, dtype=np.float64)
    sorted_x = np.sort(x)
    left = np.searchsorted(sorted_x, x, side="left")
    right = np.searchsorted(sorted_x, x, side="right")
    return 0.5 * (left + right + 1)


def auc(scores, labels) -> float:
    """Pr(score+ > score-) + 0.5 * Pr(tie), via the rank-sum identity."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    n_pos = int(np.sum(labels == 1))
    n_neg = int(np.sum(labels == 0))
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("AUC needs both classes present")
    ranks = _midranks(scores)
    pos_rank_sum = float(np.sum(ranks[labels == 1]))
    return (pos_rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def f1_score(precision: float, recall: float) -> float:
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def classification_report(scores, labels, threshold: float = 0.5) -> ClassificationReport:
    """Confusion statistics at a threshold (score >= threshold is positive).

    With zero predicted positives, precision is undefined: it is reported
    as nan with precision_defined=False, never silently as 0.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels).astype(int)
    n = scores.size
    pred = scores >= threshold
    tp = int(np.sum(pred & (labels == 1)))
    fp = int(np.sum(pred & (labels == 0)))
    fn = int(np.sum(~pred & (labels == 1)))
    tn = int(np.sum(~pred & (labels == 0)))
    accuracy = (tp + tn) / n
    recall = tp / (tp + fn) if tp + fn else 0.0
    if tp + fp == 0:
        precision, f1, defined = float("nan"), float("nan"), False
    else:
        precision = tp / (tp + fp)
        f1 = f1_score(precision, recall)
        defined = True
    return ClassificationReport(
        auc=auc(scores, labels),
        accuracy=accuracy,
        precision=precision,
        recall=recall,
        f1=f1,
        threshold=threshold,
        n=n,
        precision_defined=defined,
    )


def regression_report(predictions, targets, p: int) -> RegressionReport:
    """MSE, R^2 = 1 - SS_res/SS_tot, and the classical adjusted R^2."""
    predictions = np.asarray(predictions, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    n = targets.size
    if n <= p + 1:
        raise MetricError(f"n={n} too small for p={p} predictors")
    resid = predictions - targets
    mse = float(np.mean(resid * resid))
    ss_tot = float(np.sum((targets - targets.mean()) ** 2))
    if ss_tot == 0.0:
        raise UndefinedMetricError("zero target variance: R^2 undefined")
    r2 = 1.0 - float(np.sum(resid * resid)) / ss_tot
    adj_r2 = 1.0 - (1.0 - r2) * (n - 1) / (n - p - 1)
    return RegressionReport(mse=mse, r2=r2, adj_r2=adj_r2, n=n, p=p)
