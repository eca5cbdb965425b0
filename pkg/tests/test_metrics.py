import numpy as np
import pytest
from sklearn.metrics import f1_score, roc_auc_score

from efge.evaluation.metrics import auc, hadamard, macro_f1, micro_f1

from conftest import auc_monotone_case, micro_accuracy_case


def test_perfect_predictions():
    assert micro_f1([0, 1, 2], [0, 1, 2]) == macro_f1([0, 1, 2], [0, 1, 2]) == 1.0


def test_hand_computed_f1():
    truth, pred = [0, 0, 1, 1], [0, 1, 1, 1]
    assert macro_f1(pred, truth) == pytest.approx(11 / 15)
    assert micro_f1(pred, truth) == 0.75


def test_macro_only_counts_truth_classes():
    # class 2 is only predicted, so it does not enter the average
    assert macro_f1([0, 2], [0, 0]) == pytest.approx(2 / 3)


def test_f1_against_sklearn(rng):
    for _ in range(50):
        n, k = int(rng.integers(5, 100)), int(rng.integers(2, 6))
        truth, pred = rng.integers(0, k, n), rng.integers(0, k, n)
        present = np.unique(truth)
        assert micro_f1(pred, truth) == pytest.approx(f1_score(truth, pred, average="micro"))
        assert macro_f1(pred, truth) == pytest.approx(
            f1_score(truth, pred, labels=present, average="macro", zero_division=0))


def test_f1_length_mismatch():
    with pytest.raises(ValueError):
        micro_f1([0, 1], [0])
    with pytest.raises(ValueError):
        macro_f1([], [])


def test_auc_examples():
    assert auc([0.1, 0.2, 0.8, 0.9], [0, 0, 1, 1]) == 1.0
    assert auc([0.3] * 6, [0, 1, 0, 1, 1, 0]) == 0.5
    assert auc([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1]) == 0.75


def test_auc_against_sklearn(rng):
    for _ in range(50):
        n = int(rng.integers(4, 80))
        labels = rng.integers(0, 2, n)
        labels[:2] = [0, 1]
        scores = np.round(rng.normal(size=n), 1)
        assert auc(scores, labels) == pytest.approx(roc_auc_score(labels, scores))


def test_auc_single_class():
    with pytest.raises(ValueError):
        auc([0.1, 0.2], [1, 1])


def test_auc_monotone_invariance(rng):
    assert all(auc_monotone_case(rng) for _ in range(100))


def test_micro_equals_accuracy(rng):
    assert all(micro_accuracy_case(rng) for _ in range(100))


def test_hadamard():
    assert hadamard([1, 2], [3, 4]).tolist() == [3, 8]
    a, b = np.array([1.5, -2.0, 3.0]), np.array([0.5, 4.0, -1.0])
    assert np.array_equal(hadamard(a, b), hadamard(b, a))
    assert np.all(hadamard(a, np.zeros(3)) == 0)
    with pytest.raises(ValueError):
        hadamard([1, 2], [1, 2, 3])
