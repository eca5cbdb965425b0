"""L2-regularised binary logistic regression fitted by Newton's method.

Minimises ``sum_i logloss(y_i, w.x_i + b) + (l2 / 2) * ||w||^2``; the bias is
not penalised. With ``l2 = 1`` this matches scikit-learn's ``C = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit, log_expit


@dataclass(frozen=True)
class LogRegModel:
    weights: np.ndarray
    bias: float
    l2: float

    def decision_function(self, features) -> np.ndarray:
        return np.asarray(features) @ self.weights + self.bias

    def predict_proba(self, features) -> np.ndarray:
        return expit(self.decision_function(features))


def _loss(X1, y, theta, l2):
    z = X1 @ theta
    # -[y log s(z) + (1-y) log s(-z)]
    return -(y * log_expit(z) + (1 - y) * log_expit(-z)).sum() + 0.5 * l2 * theta[:-1] @ theta[:-1]


def _gradient(X1, y, theta, l2):
    grad = X1.T @ (expit(X1 @ theta) - y)
    grad[:-1] += l2 * theta[:-1]
    return grad


def logreg_gradient(model: LogRegModel, features, targets) -> np.ndarray:
    """Gradient of the training objective at ``model``, bias component last."""
    X1 = np.column_stack([np.asarray(features, dtype=np.float64), np.ones(len(features))])
    theta = np.append(model.weights, model.bias)
    return _gradient(X1, np.asarray(targets, dtype=np.float64), theta, model.l2)


def logreg_fit(features, targets, l2: float = 1.0, tol: float = 1e-6,
               max_iter: int = 1000) -> LogRegModel:
    """Fit until the objective gradient norm drops below ``tol``."""
    X = np.asarray(features, dtype=np.float64)
    y = np.asarray(targets, dtype=np.float64)
    if X.ndim != 2 or len(X) != len(y):
        raise ValueError("features must be (n, d) with one target per row")
    if not np.all(np.isfinite(X)):
        raise ValueError("features contain non-finite values")
    if l2 <= 0:
        raise ValueError("l2 must be positive")
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("targets must be 0/1")
    if y.min() == y.max():
        raise ValueError("targets contain a single class")
    n, d = X.shape
    X1 = np.column_stack([X, np.ones(n)])
    prior = y.mean()
    theta = np.zeros(d + 1)
    theta[-1] = np.log(prior / (1 - prior))
    reg = np.full(d + 1, l2)
    reg[-1] = 0.0
    loss = _loss(X1, y, theta, l2)
    for _ in range(max_iter):
        grad = _gradient(X1, y, theta, l2)
        if np.linalg.norm(grad) < tol:
            break
        s = expit(X1 @ theta)
        hess = (X1 * (s * (1 - s))[:, None]).T @ X1 + np.diag(reg)
        try:
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(hess, grad, rcond=None)[0]
        t = 1.0
        # backtracking (Armijo) line search
        while t > 1e-12:
            cand = theta - t * step
            cand_loss = _loss(X1, y, cand, l2)
            if cand_loss <= loss - 1e-4 * t * (grad @ step):
                break
            t *= 0.5
        if t <= 1e-12:
            break
        theta, loss = cand, cand_loss
    return LogRegModel(theta[:-1].copy(), float(theta[-1]), l2)


def logreg_score(model: LogRegModel, feature) -> float:
    return float(model.predict_proba(np.asarray(feature)[None, :])[0])
