"""Negative-sampling SGD for the exponential-family embedding models."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numba
import numpy as np
from numba import njit, prange

from ._rng import new_state, next_below, stream_state
from .graph import Graph
from .model import ModelKind, _gradient, _objective
from .sampling import NegativeSampler, draw_excluding
from .walks import WalkCorpus

log = logging.getLogger(__name__)


class NumericalError(RuntimeError):
    """Training produced a non-finite parameter."""


@dataclass(frozen=True)
class TrainConfig:
    model: ModelKind = field(default_factory=ModelKind)
    dim: int = 128
    negatives: int = 5
    window: int = 10
    lr_start: float = 0.025
    lr_min: float | None = None
    epochs: int = 1
    clamp: float | None = None
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.negatives < 1:
            raise ValueError("negatives must be >= 1")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if not 0 < self.min_learning_rate <= self.lr_start:
            raise ValueError("need 0 < lr_min <= lr_start")
        if self.dot_clamp <= 0:
            raise ValueError("clamp must be positive")

    @property
    def min_learning_rate(self) -> float:
        return self.lr_start * 1e-4 if self.lr_min is None else self.lr_min

    @property
    def dot_clamp(self) -> float:
        return self.model.default_clamp if self.clamp is None else self.clamp


@dataclass
class EmbeddingMatrix:
    """``alpha`` holds context vectors, ``beta`` center vectors; rows are node ids."""

    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        if self.alpha.shape != self.beta.shape:
            raise ValueError("alpha and beta must have the same shape")

    @property
    def dim(self) -> int:
        return self.alpha.shape[1]

    @property
    def num_nodes(self) -> int:
        return self.alpha.shape[0]

    def copy(self) -> "EmbeddingMatrix":
        return EmbeddingMatrix(self.alpha.copy(), self.beta.copy())


def init_embeddings(num_nodes: int, dim: int, seed: int) -> EmbeddingMatrix:
    rng = np.random.default_rng(seed)
    beta = rng.uniform(-0.5 / dim, 0.5 / dim, size=(num_nodes, dim))
    return EmbeddingMatrix(np.zeros((num_nodes, dim)), beta)


@njit(cache=True)
def _update(beta, alpha, c, u, code, x, sigma, clamp, lr, neu):
    d = beta.shape[1]
    dot = 0.0
    for i in range(d):
        dot += beta[c, i] * alpha[u, i]
    if not math.isfinite(dot):
        return False
    if dot > clamp:
        dot = clamp
    elif dot < -clamp:
        dot = -clamp
    g = lr * _gradient(code, x, dot, sigma)
    for i in range(d):
        neu[i] += g * alpha[u, i]
        alpha[u, i] += g * beta[c, i]
    return True


@njit(cache=True)
def _train_range(nodes, offsets, w_lo, w_hi, epochs, window, alpha, beta, code,
                 sigma_pos, sigma_neg, clamp, k, accept, alias, support,
                 lr_start, lr_min, total_pairs, state, status):
    d = beta.shape[1]
    neu = np.zeros(d)
    done = 0
    for _ in range(epochs):
        for w in range(w_lo, w_hi):
            a = offsets[w]
            b = offsets[w + 1]
            for l in range(a, b):
                c = nodes[l]
                lo = max(a, l - window)
                hi = min(b, l + window + 1)
                for t in range(lo, hi):
                    if t == l:
                        continue
                    o = nodes[t]
                    lr = lr_start * (1.0 - done / total_pairs)
                    if lr < lr_min:
                        lr = lr_min
                    neu[:] = 0.0
                    ok = _update(beta, alpha, c, o, code, 1.0, sigma_pos, clamp, lr, neu)
                    u = o
                    for _s in range(k):
                        if not ok:
                            break
                        u = draw_excluding(accept, alias, support, o, state)
                        ok = _update(beta, alpha, c, u, code, 0.0, sigma_neg, clamp, lr, neu)
                    if not ok:
                        status[0] = 1
                        status[1] = done
                        status[2] = c
                        status[3] = u
                        return
                    for i in range(d):
                        beta[c, i] += neu[i]
                    done += 1


@njit(cache=True, parallel=True)
def _train_hogwild(nodes, offsets, bounds, epochs, window, alpha, beta, code,
                   sigma_pos, sigma_neg, clamp, k, accept, alias, support,
                   lr_start, lr_min, worker_pairs, seed, status):
    # workers write to shared rows without locks
    for t in prange(len(bounds) - 1):
        state = np.empty(1, dtype=np.uint64)
        state[0] = stream_state(seed, t)
        _train_range(nodes, offsets, bounds[t], bounds[t + 1], epochs, window, alpha, beta,
                     code, sigma_pos, sigma_neg, clamp, k, accept, alias, support,
                     lr_start, lr_min, max(worker_pairs[t], 1), state, status[t])


def _pair_counts(corpus: WalkCorpus, window: int) -> np.ndarray:
    lengths = corpus.lengths()
    w = np.minimum(window, np.maximum(lengths - 1, 0))
    return 2 * (w * lengths - w * (w + 1) // 2)


def _raise_numeric(status, worker: int = 0):
    _, it, c, u = (int(s) for s in status)
    raise NumericalError(
        f"non-finite parameter at pair {it} (worker {worker}): center node {c}, target node {u}")


def train(g: Graph, corpus: WalkCorpus, cfg: TrainConfig, init: EmbeddingMatrix | None = None,
          sampler: NegativeSampler | None = None) -> EmbeddingMatrix:
    """Fit center and context vectors to every (center, context) pair of ``corpus``.

    Each pair gets one positive update and ``cfg.negatives`` negative updates
    against nodes drawn from the unigram^0.75 distribution (never the
    context node itself). The learning rate decays linearly over the
    scheduled pair count. With ``cfg.threads == 1`` the result is a pure
    function of the inputs and ``cfg.seed``.
    """
    n = g.num_nodes
    if len(corpus.nodes) and (corpus.nodes.min() < 0 or corpus.nodes.max() >= n):
        raise ValueError("corpus references nodes outside the graph")
    emb = init.copy() if init is not None else init_embeddings(n, cfg.dim, cfg.seed)
    if emb.alpha.shape != (n, cfg.dim):
        raise ValueError("initial embeddings have the wrong shape")
    if sampler is None:
        sampler = NegativeSampler.from_corpus(corpus, n)
    if len(sampler.support) < 2:
        sampler.check_can_exclude(int(sampler.support[0]))
    pairs = _pair_counts(corpus, cfg.window)
    total = int(pairs.sum()) * cfg.epochs
    if total == 0:
        log.warning("corpus has no context pairs; embeddings left at initialization")
        return emb
    model = cfg.model
    common = (cfg.epochs, cfg.window, emb.alpha, emb.beta, model.code, model.sigma_pos,
              model.sigma_neg, cfg.dot_clamp, cfg.negatives, sampler.accept, sampler.alias,
              sampler.support, cfg.lr_start, cfg.min_learning_rate)
    if cfg.threads == 1:
        status = np.zeros(4, dtype=np.int64)
        _train_range(corpus.nodes, corpus.offsets, 0, len(corpus), *common, total,
                     new_state(cfg.seed, 0), status)
        if status[0]:
            _raise_numeric(status)
    else:
        bounds = np.linspace(0, len(corpus), cfg.threads + 1).astype(np.int64)
        cum = np.concatenate([[0], np.cumsum(pairs)])
        worker_pairs = (cum[bounds[1:]] - cum[bounds[:-1]]) * cfg.epochs
        status = np.zeros((cfg.threads, 4), dtype=np.int64)
        previous = numba.get_num_threads()
        numba.set_num_threads(min(cfg.threads, numba.config.NUMBA_NUM_THREADS))
        try:
            _train_hogwild(corpus.nodes, corpus.offsets, bounds, *common, worker_pairs,
                           np.uint64(cfg.seed), status)
        finally:
            numba.set_num_threads(previous)
        for t, row in enumerate(status):
            if row[0]:
                _raise_numeric(row, t)
    for name in ("alpha", "beta"):
        bad = np.argwhere(~np.isfinite(getattr(emb, name)))
        if len(bad):
            raise NumericalError(f"non-finite {name} entries after training, first at node {bad[0][0]}")
    return emb


# -- monitoring ---------------------------------------------------------------

@njit(cache=True)
def _mean_objective(alpha, beta, centers, contexts, negatives, code, sigma_pos, sigma_neg, clamp):
    total = 0.0
    d = alpha.shape[1]
    for p in range(len(centers)):
        c = centers[p]
        for s in range(negatives.shape[1] + 1):
            if s == 0:
                u, x, sigma = contexts[p], 1.0, sigma_pos
            else:
                u, x, sigma = negatives[p, s - 1], 0.0, sigma_neg
            dot = 0.0
            for i in range(d):
                dot += beta[c, i] * alpha[u, i]
            dot = min(max(dot, -clamp), clamp)
            total += _objective(code, x, dot, sigma)
    return total / len(centers)


@njit(cache=True)
def _sample_pairs(nodes, offsets, window, size, accept, alias, support, k, state):
    centers = np.empty(size, dtype=np.int64)
    contexts = np.empty(size, dtype=np.int64)
    negatives = np.empty((size, k), dtype=np.int64)
    n_walks = len(offsets) - 1
    p = 0
    while p < size:
        w = next_below(state, n_walks)
        a = offsets[w]
        b = offsets[w + 1]
        if b - a < 2:
            continue
        l = a + next_below(state, b - a)
        lo = max(a, l - window)
        hi = min(b, l + window + 1)
        t = lo + next_below(state, hi - lo - 1)
        if t >= l:
            t += 1
        centers[p] = nodes[l]
        contexts[p] = nodes[t]
        for s in range(k):
            negatives[p, s] = draw_excluding(accept, alias, support, nodes[t], state)
        p += 1
    return centers, contexts, negatives


@dataclass
class PairSample:
    """A fixed set of positive pairs with their negatives, for tracking the objective."""

    centers: np.ndarray
    contexts: np.ndarray
    negatives: np.ndarray

    @classmethod
    def draw(cls, corpus: WalkCorpus, window: int, k: int, sampler: NegativeSampler,
             size: int = 10_000, seed: int = 0) -> "PairSample":
        if not np.any(corpus.lengths() >= 2):
            raise ValueError("corpus has no walk with at least two nodes")
        arrays = _sample_pairs(corpus.nodes, corpus.offsets, window, size, sampler.accept,
                               sampler.alias, sampler.support, k, new_state(seed, 1))
        return cls(*arrays)

    def mean_objective(self, emb: EmbeddingMatrix, cfg: TrainConfig) -> float:
        """Mean over pairs of the positive term plus its negatives' terms."""
        m = cfg.model
        return float(_mean_objective(emb.alpha, emb.beta, self.centers, self.contexts,
                                     self.negatives, m.code, m.sigma_pos, m.sigma_neg,
                                     cfg.dot_clamp))

