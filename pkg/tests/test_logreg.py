import numpy as np
import pytest
from scipy.special import expit
from sklearn.linear_model import LogisticRegression

from efge.evaluation.logreg import logreg_fit, logreg_gradient, logreg_score


def test_separable_two_points():
    X, y = np.array([[-1.0], [1.0]]), np.array([0, 1])
    model = logreg_fit(X, y)
    assert np.array_equal(model.decision_function(X) > 0, y == 1)


def test_zero_features_gives_prior_log_odds():
    y = np.array([1, 0, 0, 0, 1, 0, 0, 0])
    model = logreg_fit(np.zeros((8, 3)), y)
    assert model.bias == pytest.approx(np.log(0.25 / 0.75), abs=1e-9)
    assert logreg_score(model, np.zeros(3)) == pytest.approx(0.25, abs=1e-9)


def test_gradient_norm_at_optimum(rng):
    X = rng.normal(size=(200, 5))
    y = (X @ rng.normal(size=5) + rng.normal(size=200) > 0).astype(float)
    for l2 in (0.1, 1.0, 10.0):
        model = logreg_fit(X, y, l2=l2)
        assert np.linalg.norm(logreg_gradient(model, X, y)) < 1e-6


def test_matches_sklearn(rng):
    X = rng.normal(size=(300, 4))
    y = (X[:, 0] - X[:, 2] + 0.5 * rng.normal(size=300) > 0).astype(int)
    ours = logreg_fit(X, y, l2=1.0)
    ref = LogisticRegression(C=1.0, tol=1e-12, max_iter=10_000).fit(X, y)
    assert np.allclose(ours.weights, ref.coef_[0], atol=1e-5)
    assert ours.bias == pytest.approx(ref.intercept_[0], abs=1e-5)


def test_score_is_sigmoid(rng):
    X = rng.normal(size=(50, 2))
    y = (X[:, 0] > 0).astype(int)
    model = logreg_fit(X, y)
    x = np.array([0.3, -0.7])
    assert logreg_score(model, x) == pytest.approx(expit(model.weights @ x + model.bias))


def test_deterministic(rng):
    X = rng.normal(size=(80, 3))
    y = (X[:, 1] > 0).astype(int)
    a, b = logreg_fit(X, y), logreg_fit(X, y)
    assert np.array_equal(a.weights, b.weights) and a.bias == b.bias


@pytest.mark.parametrize("X,y", [
    (np.zeros((3, 2)), np.array([1, 1, 1])),
    (np.array([[np.nan], [0.0]]), np.array([0, 1])),
    (np.zeros((2, 1)), np.array([0, 2])),
])
def test_invalid_inputs(X, y):
    with pytest.raises(ValueError):
        logreg_fit(X, y)
