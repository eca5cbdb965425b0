"""Walks -> training, with optional on-disk corpus cache."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

from .graph import Graph
from .sampling import NegativeSampler
from .train import EmbeddingMatrix, PairSample, TrainConfig, init_embeddings, train
from .walks import WalkConfig, WalkCorpus, generate_corpus, load_corpus, stream_corpus_to_file

log = logging.getLogger(__name__)

MONITOR_PAIRS = 10_000


@dataclass
class EmbedResult:
    embeddings: EmbeddingMatrix
    corpus_walks: int
    corpus_pairs: int
    initial_objective: float
    final_objective: float


def build_corpus(g: Graph, walk_cfg: WalkConfig, cache: str | Path | None = None) -> WalkCorpus:
    if cache is None:
        return generate_corpus(g, walk_cfg)
    cache = Path(cache)
    if cache.exists():
        corpus, header = load_corpus(cache)
        expected = {"num_nodes": g.num_nodes, "walks_per_node": walk_cfg.walks_per_node,
                    "walk_length": walk_cfg.walk_length}
        if header == expected:
            log.info("reusing walk corpus %s", cache)
            return corpus
        log.info("corpus cache %s does not match this run; regenerating", cache)
    stream_corpus_to_file(g, walk_cfg, cache)
    return load_corpus(cache)[0]


def embed(g: Graph, walk_cfg: WalkConfig, train_cfg: TrainConfig,
          corpus_cache: str | Path | None = None) -> EmbedResult:
    corpus = build_corpus(g, walk_cfg, corpus_cache)
    sampler = NegativeSampler.from_corpus(corpus, g.num_nodes)
    init = init_embeddings(g.num_nodes, train_cfg.dim, train_cfg.seed)
    monitor = None
    if train_cfg.window and any(corpus.lengths() >= 2):
        monitor = PairSample.draw(corpus, train_cfg.window, train_cfg.negatives, sampler,
                                  size=MONITOR_PAIRS, seed=train_cfg.seed)
    before = monitor.mean_objective(init, train_cfg) if monitor else float("nan")
    emb = train(g, corpus, train_cfg, init=init, sampler=sampler)
    after = monitor.mean_objective(emb, train_cfg) if monitor else float("nan")
    return EmbedResult(emb, len(corpus), corpus.pair_count(train_cfg.window) * train_cfg.epochs,
                       before, after)
