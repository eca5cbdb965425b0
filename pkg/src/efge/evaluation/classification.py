"""Multi-ratio node classification with one-vs-rest logistic regression."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..graph import LabelMap
from .logreg import LogRegModel, logreg_fit
from .metrics import macro_f1, micro_f1

log = logging.getLogger(__name__)

DEFAULT_RATIOS = (0.02, 0.04, 0.06, 0.08, 0.10, 0.30, 0.50, 0.70, 0.90)
SPLIT_ATTEMPTS = 100


def split_labeled_nodes(labels: LabelMap, ratio: float, rng: np.random.Generator):
    """Random train/test split of the labeled nodes.

    The split is redrawn (up to ``SPLIT_ATTEMPTS`` times) until every class
    has a training node, if the training size allows it.
    """
    if not 0 < ratio < 1:
        raise ValueError("ratio must lie in (0, 1)")
    nodes = labels.labeled_nodes()
    n_train = int(round(ratio * len(nodes)))
    if n_train == 0 or n_train == len(nodes):
        raise ValueError(f"ratio {ratio} leaves an empty train or test set for {len(nodes)} nodes")
    classes = np.unique(labels.labels[nodes])
    for _ in range(SPLIT_ATTEMPTS):
        perm = rng.permutation(nodes)
        train, test = perm[:n_train], perm[n_train:]
        if n_train < len(classes) or len(np.unique(labels.labels[train])) == len(classes):
            break
    else:
        log.info("ratio %s: some classes missing from the training split", ratio)
    return np.sort(train), np.sort(test)


def fit_one_vs_rest(features, targets, num_classes: int, l2: float = 1.0) -> dict[int, LogRegModel]:
    """One binary model per class; classes that are all-in or all-out are skipped."""
    models = {}
    for c in range(num_classes):
        y = (targets == c).astype(np.float64)
        if 0 < y.sum() < len(y):
            models[c] = logreg_fit(features, y, l2)
    return models


def predict_multiclass(models: dict[int, LogRegModel], features) -> np.ndarray:
    """Arg-max class per row; equal scores resolve to the smaller label id."""
    if len(models) < 2:
        raise ValueError("need at least two class models")
    classes = np.array(sorted(models))
    scores = np.column_stack([models[c].decision_function(features) for c in classes])
    # decision values are monotone in the probabilities, and avoid ties from saturation
    return classes[np.argmax(scores, axis=1)]


@dataclass
class ClassificationReport:
    ratios: list[float]
    micro: dict[float, list[float]] = field(default_factory=dict)
    macro: dict[float, list[float]] = field(default_factory=dict)

    @property
    def repeats(self) -> int:
        return len(next(iter(self.micro.values()), []))

    def mean_micro(self, ratio: float) -> float:
        return float(np.mean(self.micro[ratio]))

    def mean_macro(self, ratio: float) -> float:
        return float(np.mean(self.macro[ratio]))

    def as_dict(self) -> dict:
        return {
            "ratios": self.ratios,
            "repeats": self.repeats,
            "mean_micro_f1": {str(r): self.mean_micro(r) for r in self.ratios},
            "mean_macro_f1": {str(r): self.mean_macro(r) for r in self.ratios},
            "micro_f1": {str(r): self.micro[r] for r in self.ratios},
            "macro_f1": {str(r): self.macro[r] for r in self.ratios},
        }

    def table(self) -> str:
        lines = [f"{'ratio':>7} {'micro-F1':>9} {'macro-F1':>9}"]
        for r in self.ratios:
            lines.append(f"{r:>7.0%} {self.mean_micro(r):>9.4f} {self.mean_macro(r):>9.4f}")
        return "\n".join(lines)


def evaluate_classification(features, labels: LabelMap, ratios=DEFAULT_RATIOS, repeats: int = 50,
                            l2: float = 1.0, seed: int = 0) -> ClassificationReport:
    """Average Micro/Macro-F1 over ``repeats`` random splits at each train ratio.

    Each (ratio, repeat) cell draws from its own generator, so cells can be
    evaluated in any order with the same result.
    """
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    features = np.asarray(features, dtype=np.float64)
    report = ClassificationReport(list(ratios))
    for i, ratio in enumerate(ratios):
        report.micro[ratio], report.macro[ratio] = [], []
        for r in range(repeats):
            rng = np.random.default_rng([seed, i, r])
            train, test = split_labeled_nodes(labels, ratio, rng)
            y_train = labels.labels[train]
            models = fit_one_vs_rest(features[train], y_train, labels.label_count, l2)
            if len(models) < 2:
                # a single training class: every prediction is that class
                pred = np.full(len(test), np.bincount(y_train).argmax())
            else:
                pred = predict_multiclass(models, features[test])
            truth = labels.labels[test]
            report.micro[ratio].append(micro_f1(pred, truth))
            report.macro[ratio].append(macro_f1(pred, truth))
    return report
