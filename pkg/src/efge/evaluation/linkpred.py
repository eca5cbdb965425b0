"""Link prediction: connected edge removal, Hadamard features, AUC."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..graph import Graph, is_connected, remove_edges_keep_connected
from .logreg import logreg_fit
from .metrics import auc

MAX_SAMPLING_ROUNDS = 1000


@dataclass
class LinkPredDataset:
    original: Graph
    residual: Graph
    train_pairs: np.ndarray
    train_labels: np.ndarray
    test_pairs: np.ndarray
    test_labels: np.ndarray
    target_removed: int

    @property
    def removed_count(self) -> int:
        return int(self.test_labels.sum())

    @property
    def removal_fraction(self) -> float:
        return self.removed_count / self.original.num_edges


@dataclass
class LinkPredReport:
    auc: float
    train_positives: int
    train_negatives: int
    test_positives: int
    test_negatives: int
    target_removed: int
    removal_fraction: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)

    def table(self) -> str:
        return "\n".join([
            f"AUC              {self.auc:.4f}",
            f"train pos/neg    {self.train_positives}/{self.train_negatives}",
            f"test pos/neg     {self.test_positives}/{self.test_negatives}",
            f"edges removed    {self.test_positives} of target {self.target_removed}"
            f" (fraction {self.removal_fraction:.4f})",
        ])


def _pair_keys(pairs, n):
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    return np.minimum(pairs[:, 0], pairs[:, 1]) * n + np.maximum(pairs[:, 0], pairs[:, 1])


def sample_non_edges(g: Graph, count: int, rng: np.random.Generator, exclude_keys=()) -> np.ndarray:
    """``count`` distinct node pairs, uniform over pairs that are not edges of ``g``."""
    n = g.num_nodes
    forbidden = set(_pair_keys(g.edges(), n).tolist()) | set(int(k) for k in exclude_keys)
    available = n * (n - 1) // 2 - len(forbidden)
    if count > available:
        raise ValueError(f"graph too dense: need {count} non-edges, only {available} available")
    chosen: dict[int, None] = {}
    for _ in range(MAX_SAMPLING_ROUNDS):
        if len(chosen) == count:
            break
        need = count - len(chosen)
        u = rng.integers(0, n, size=2 * need + 16)
        v = rng.integers(0, n, size=2 * need + 16)
        for a, b in zip(u.tolist(), v.tolist()):
            if a == b:
                continue
            key = min(a, b) * n + max(a, b)
            if key in forbidden or key in chosen:
                continue
            chosen[key] = None
            if len(chosen) == count:
                break
    if len(chosen) < count:
        raise RuntimeError("could not sample enough non-edges")
    keys = np.fromiter(chosen, dtype=np.int64, count=len(chosen))
    return np.stack([keys // n, keys % n], axis=1)


def build_lp_dataset(g: Graph, rng: np.random.Generator, fraction: float = 0.5) -> LinkPredDataset:
    """Split ``g`` into a connected residual graph plus labeled train/test pairs.

    Test positives are the removed edges; test negatives the same number of
    non-edges of ``g``. Train positives are the residual edges; train
    negatives the same number of further non-edges, disjoint from the test
    negatives.
    """
    if not is_connected(g):
        raise ValueError("link prediction needs a connected graph")
    n_edges = g.num_edges
    target = int(np.floor(fraction * n_edges))
    available = g.num_nodes * (g.num_nodes - 1) // 2 - n_edges
    if available < n_edges:
        raise ValueError(f"graph too dense: {available} non-edges for {n_edges} negatives")
    residual, removed = remove_edges_keep_connected(g, fraction, rng)
    test_neg = sample_non_edges(g, len(removed), rng)
    train_pos = residual.edges()
    train_neg = sample_non_edges(g, len(train_pos), rng, exclude_keys=_pair_keys(test_neg, g.num_nodes))
    test_pairs = np.concatenate([removed, test_neg])
    test_labels = np.concatenate([np.ones(len(removed)), np.zeros(len(test_neg))])
    train_pairs = np.concatenate([train_pos, train_neg])
    train_labels = np.concatenate([np.ones(len(train_pos)), np.zeros(len(train_neg))])
    return LinkPredDataset(g, residual, train_pairs, train_labels, test_pairs, test_labels, target)


def edge_features(vectors: np.ndarray, pairs: np.ndarray) -> np.ndarray:
    """Hadamard product of the two endpoint vectors, one row per pair."""
    return vectors[pairs[:, 0]] * vectors[pairs[:, 1]]


def evaluate_link_prediction(vectors: np.ndarray, data: LinkPredDataset, l2: float = 1.0) -> LinkPredReport:
    model = logreg_fit(edge_features(vectors, data.train_pairs), data.train_labels, l2)
    scores = model.decision_function(edge_features(vectors, data.test_pairs))
    return LinkPredReport(
        auc=auc(scores, data.test_labels),
        train_positives=int(data.train_labels.sum()),
        train_negatives=int((data.train_labels == 0).sum()),
        test_positives=int(data.test_labels.sum()),
        test_negatives=int((data.test_labels == 0).sum()),
        target_removed=data.target_removed,
        removal_fraction=data.removal_fraction,
    )
