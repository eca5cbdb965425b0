from __future__ import annotations

import numpy as np
from scipy.stats import rankdata


def _check_pair(pred, truth):
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise ValueError("prediction and truth lengths differ")
    if pred.size == 0:
        raise ValueError("empty input")
    return pred, truth


def micro_f1(pred, truth) -> float:
    """F1 over confusion counts pooled across classes.

    In the single-label setting every wrong prediction is one false positive
    and one false negative, so this equals accuracy.
    """
    pred, truth = _check_pair(pred, truth)
    tp = np.sum(pred == truth)
    fp = fn = len(pred) - tp
    return float(2 * tp / (2 * tp + fp + fn))


def macro_f1(pred, truth) -> float:
    """Unweighted mean of per-class F1 over the classes that occur in ``truth``."""
    pred, truth = _check_pair(pred, truth)
    scores = []
    for c in np.unique(truth):
        tp = np.sum((pred == c) & (truth == c))
        fp = np.sum((pred == c) & (truth != c))
        fn = np.sum((pred != c) & (truth == c))
        scores.append(2 * tp / (2 * tp + fp + fn))
    return float(np.mean(scores))


def auc(scores, labels) -> float:
    """Mann-Whitney estimate of P(score_pos > score_neg), ties counted half."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape:
        raise ValueError("scores and labels lengths differ")
    pos = labels == 1
    n_pos = int(pos.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs both positive and negative labels")
    ranks = rankdata(scores)
    return float((ranks[pos].sum() - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg))


def hadamard(a, b) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError("vectors must have equal dimension")
    return a * b
