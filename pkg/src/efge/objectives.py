"""Exact corpus-level objectives, for checking the sampled training objective.

These enumerate every node for every context position, so they are only
meant for small graphs.
"""

from __future__ import annotations

from typing import Callable

import numpy as np
from scipy.special import log_expit

from .walks import WalkCorpus


def _positions(corpus: WalkCorpus, window: int):
    for walk in corpus:
        n = len(walk)
        for l in range(n):
            for t in range(max(0, l - window), min(n, l + window + 1)):
                if t != l:
                    yield int(walk[l]), int(walk[t])


def objective_full_bern(corpus: WalkCorpus, alpha: np.ndarray, beta: np.ndarray, window: int) -> float:
    """Bernoulli log-likelihood with every non-occupying node as an explicit negative.

    For each (center, position) pair this adds ``log sigmoid(dot)`` for the
    node at that position and ``log sigmoid(-dot)`` for each other node.
    """
    total = 0.0
    for c, o in _positions(corpus, window):
        dots = alpha @ beta[c]
        neg = log_expit(-dots)
        total += log_expit(dots[o]) + neg.sum() - neg[o]
    return float(total)


def uniform_excluding(num_nodes: int) -> Callable[[int], np.ndarray]:
    """Noise distribution uniform over every node except the positive context."""
    def q(target: int) -> np.ndarray:
        p = np.full(num_nodes, 1.0 / (num_nodes - 1))
        p[target] = 0.0
        return p
    return q


def expected_negative_sampling_bern(corpus: WalkCorpus, alpha: np.ndarray, beta: np.ndarray,
                                    window: int, k: int,
                                    noise: Callable[[int], np.ndarray]) -> float:
    """Negative-sampling objective with the sampling expectation taken exactly.

    Each (center, position) pair contributes ``log sigmoid(dot)`` plus
    ``k * E_{u ~ noise(context)}[log sigmoid(-dot_u)]``, the expectation
    summed over every node.
    """
    total = 0.0
    for c, o in _positions(corpus, window):
        dots = alpha @ beta[c]
        total += log_expit(dots[o]) + k * float(noise(o) @ log_expit(-dots))
    return float(total)


def bigclam_form_equivalence(beta: np.ndarray, alpha: np.ndarray, positive) -> tuple[float, float]:
    """Bernoulli objective with ``pi = P(Z > 0)``, ``Z ~ Poisson(beta.alpha)``, two ways.

    ``beta[i]`` and ``alpha[i]`` are the paired center/context rows and
    ``positive[i]`` marks pairs inside a context window.

    ``lhs`` goes through the Poisson natural parameter ``eta = log(beta.alpha)``
    and the Bernoulli likelihood; ``rhs`` is the closed form
    ``sum_pos log(1 - exp(-beta.alpha)) - sum_neg beta.alpha``.
    """
    beta = np.atleast_2d(np.asarray(beta, dtype=np.float64))
    alpha = np.atleast_2d(np.asarray(alpha, dtype=np.float64))
    positive = np.asarray(positive, dtype=bool).reshape(-1)
    prod = np.einsum("ij,ij->i", beta, alpha)
    if np.any(prod <= 0):
        raise ValueError("every beta.alpha product must be positive")
    eta = np.log(prod)
    rate = np.exp(eta)
    p_zero = np.exp(-rate)
    pi = 1.0 - p_zero
    lhs = np.log(pi[positive]).sum() + np.log(p_zero[~positive]).sum()
    rhs = np.log(1.0 - np.exp(-prod[positive])).sum() - prod[~positive].sum()
    return float(lhs), float(rhs)
