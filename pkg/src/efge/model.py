"""Exponential-family kernels for a single (center, context) pair.

Every model scores a pair through the dot product ``beta[center] . alpha[context]``.
The Bernoulli and Poisson models use it directly as the natural parameter;
the Normal model maps it through ``exp(-dot)``. All kernels are compiled
with numba so the trainer can call them per update.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from numba import njit

BERN, POIS, NORM = 0, 1, 2
POSITIVE, NEGATIVE = 1, 0

_CODES = {"bern": BERN, "pois": POIS, "norm": NORM}
DEFAULT_CLAMP = {BERN: 6.0, POIS: 10.0, NORM: 10.0}


@dataclass(frozen=True)
class ModelKind:
    """Which conditional distribution to use; sigmas only matter for ``norm``."""

    name: str = "bern"
    sigma_pos: float = 1.0
    sigma_neg: float = 1.0

    def __post_init__(self):
        if self.name not in _CODES:
            raise ValueError(f"unknown model {self.name!r}; expected one of {sorted(_CODES)}")
        if self.sigma_pos <= 0 or self.sigma_neg <= 0:
            raise ValueError("sigma values must be positive")

    @property
    def code(self) -> int:
        return _CODES[self.name]

    @property
    def default_clamp(self) -> float:
        return DEFAULT_CLAMP[self.code]


@njit(cache=True)
def softplus(x):
    """``log(1 + exp(x))`` without overflow."""
    if x > 0:
        return x + math.log1p(math.exp(-x))
    return math.log1p(math.exp(x))


@njit(cache=True)
def sigmoid(x):
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    z = math.exp(x)
    return z / (1.0 + z)


@njit(cache=True)
def _eta(code, dot):
    if code == NORM:
        return math.exp(-dot)
    return dot


@njit(cache=True)
def _log_normalizer(code, eta):
    if code == BERN:
        return softplus(eta)
    if code == POIS:
        return math.exp(eta)
    return 0.5 * eta * eta


@njit(cache=True)
def _objective(code, x, dot, sigma):
    # eta-dependent part of log p(x); base measures are dropped
    if code == NORM:
        eta = math.exp(-dot)
        return x * eta / sigma - 0.5 * eta * eta
    return x * dot - _log_normalizer(code, dot)


@njit(cache=True)
def _gradient(code, x, dot, sigma):
    # d objective / d dot
    if code == BERN:
        return x - sigmoid(dot)
    if code == POIS:
        return x - math.exp(dot)
    eta = math.exp(-dot)
    return (x / sigma - eta) * (-eta)


def _sigma(model: ModelKind, polarity: int) -> float:
    if polarity == POSITIVE:
        return model.sigma_pos
    if polarity == NEGATIVE:
        return model.sigma_neg
    raise ValueError("polarity must be POSITIVE or NEGATIVE")


def _check_finite(*values) -> None:
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"non-finite input {v!r}")


def natural_parameter(model: ModelKind, dot: float) -> float:
    return _eta(model.code, float(dot))


def log_normalizer(model: ModelKind, eta: float) -> float:
    return _log_normalizer(model.code, float(eta))


def pair_objective(model: ModelKind, x: float, dot: float, polarity: int) -> float:
    """Log-likelihood (up to the base measure) of observing ``x`` for one pair."""
    _check_finite(x, dot)
    return _objective(model.code, float(x), float(dot), _sigma(model, polarity))


def pair_gradient(model: ModelKind, x: float, dot: float, polarity: int) -> float:
    """Derivative of :func:`pair_objective` with respect to the dot product."""
    _check_finite(x, dot)
    return _gradient(model.code, float(x), float(dot), _sigma(model, polarity))
