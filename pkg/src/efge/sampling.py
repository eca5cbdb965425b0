"""Noise distribution for negative sampling (alias method)."""

from __future__ import annotations

import numpy as np
from numba import njit

from ._rng import next_below, next_float, new_state, seed_from


def build_alias_table(probs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vose's alias tables for ``probs`` (must sum to one)."""
    probs = np.asarray(probs, dtype=np.float64)
    n = len(probs)
    if n == 0:
        raise ValueError("empty distribution")
    scaled = probs * n
    accept = np.zeros(n)
    alias = np.zeros(n, dtype=np.int64)
    small = [i for i in range(n) if scaled[i] < 1.0]
    large = [i for i in range(n) if scaled[i] >= 1.0]
    while small and large:
        s, l = small.pop(), large.pop()
        accept[s] = scaled[s]
        alias[s] = l
        scaled[l] = (scaled[l] + scaled[s]) - 1.0
        (small if scaled[l] < 1.0 else large).append(l)
    for i in large + small:
        accept[i] = 1.0
        alias[i] = i
    return accept, alias


@njit(cache=True)
def alias_draw(accept, alias, support, state):
    i = next_below(state, len(accept))
    if next_float(state) < accept[i]:
        return support[i]
    return support[alias[i]]


@njit(cache=True)
def draw_excluding(accept, alias, support, exclude, state):
    u = alias_draw(accept, alias, support, state)
    while u == exclude:
        u = alias_draw(accept, alias, support, state)
    return u


class NegativeSampler:
    """Draws nodes with probability proportional to ``frequency ** power``.

    Only nodes with nonzero frequency are in the support.
    """

    def __init__(self, frequencies, power: float = 0.75):
        freq = np.asarray(frequencies, dtype=np.float64)
        if np.any(freq < 0):
            raise ValueError("frequencies must be non-negative")
        self.support = np.flatnonzero(freq > 0).astype(np.int64)
        if len(self.support) == 0:
            raise ValueError("no node has nonzero frequency")
        weights = freq[self.support] ** power
        self.probs = weights / weights.sum()
        self.accept, self.alias = build_alias_table(self.probs)

    @classmethod
    def from_corpus(cls, corpus, num_nodes: int, power: float = 0.75) -> "NegativeSampler":
        return cls(corpus.node_frequencies(num_nodes), power)

    def probability(self, num_nodes: int) -> np.ndarray:
        """Dense probability vector over all ``num_nodes`` ids."""
        p = np.zeros(num_nodes)
        p[self.support] = self.probs
        return p

    def check_can_exclude(self, exclude: int) -> None:
        if len(self.support) == 1 and self.support[0] == exclude:
            raise ValueError(f"cannot draw negatives: node {exclude} is the only node in the support")


def draw_negatives(sampler: NegativeSampler, k: int, exclude: int, rng: np.random.Generator) -> np.ndarray:
    """``k`` i.i.d. draws from the noise distribution, redrawing any hit on ``exclude``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    sampler.check_can_exclude(exclude)
    return _draw_many(sampler.accept, sampler.alias, sampler.support, k, exclude,
                      new_state(seed_from(rng)))


@njit(cache=True)
def _draw_many(accept, alias, support, k, exclude, state):
    out = np.empty(k, dtype=np.int64)
    for s in range(k):
        out[s] = draw_excluding(accept, alias, support, exclude, state)
    return out
