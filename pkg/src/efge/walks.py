"""Random-walk corpora and (center, context) enumeration."""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, NamedTuple

import numpy as np
from numba import njit, prange

from ._rng import next_below, next_float, seed_from, stream_state
from .graph import Graph

CORPUS_MAGIC = b"EFGW"
CORPUS_VERSION = 1
_HEADER = struct.Struct("<4sIIII")


@dataclass(frozen=True)
class WalkConfig:
    walks_per_node: int = 80
    walk_length: int = 10
    window: int = 10
    p: float = 1.0
    q: float = 1.0
    biased: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.walks_per_node < 1:
            raise ValueError("walks_per_node must be >= 1")
        if self.walk_length < 2:
            raise ValueError("walk_length must be >= 2")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.p <= 0 or self.q <= 0:
            raise ValueError("p and q must be positive")


class ContextPair(NamedTuple):
    center: int
    context: int
    offset: int


class WalkCorpus:
    """Variable-length walks stored as one flat id array plus offsets."""

    def __init__(self, nodes: np.ndarray, offsets: np.ndarray):
        self.nodes = np.ascontiguousarray(nodes, dtype=np.int32)
        self.offsets = np.ascontiguousarray(offsets, dtype=np.int64)

    @classmethod
    def from_walks(cls, walks) -> "WalkCorpus":
        walks = [np.asarray(w, dtype=np.int32) for w in walks]
        offsets = np.zeros(len(walks) + 1, dtype=np.int64)
        np.cumsum([len(w) for w in walks], out=offsets[1:])
        nodes = np.concatenate(walks) if walks else np.empty(0, dtype=np.int32)
        return cls(nodes, offsets)

    def __len__(self) -> int:
        return len(self.offsets) - 1

    def __getitem__(self, i: int) -> np.ndarray:
        return self.nodes[self.offsets[i]:self.offsets[i + 1]]

    def __iter__(self) -> Iterator[np.ndarray]:
        for i in range(len(self)):
            yield self[i]

    def lengths(self) -> np.ndarray:
        return np.diff(self.offsets)

    def node_frequencies(self, num_nodes: int) -> np.ndarray:
        return np.bincount(self.nodes, minlength=num_nodes)

    def pair_count(self, window: int) -> int:
        return int(sum(_pairs_in_walk(int(n), window) for n in self.lengths()))

    def __eq__(self, other) -> bool:
        return (isinstance(other, WalkCorpus) and np.array_equal(self.nodes, other.nodes)
                and np.array_equal(self.offsets, other.offsets))


def _pairs_in_walk(length: int, window: int) -> int:
    # sum over positions of the clipped window size, both sides
    w = min(window, length - 1)
    return 2 * (w * length - w * (w + 1) // 2)


@njit(cache=True)
def _uniform_step(indptr, indices, cur, state):
    deg = indptr[cur + 1] - indptr[cur]
    if deg == 0:
        return -1
    return indices[indptr[cur] + next_below(state, deg)]


@njit(cache=True)
def _is_neighbor(indptr, indices, u, x):
    lo = indptr[u]
    hi = indptr[u + 1]
    while lo < hi:
        mid = (lo + hi) // 2
        if indices[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo < indptr[u + 1] and indices[lo] == x


@njit(cache=True)
def _biased_step(indptr, indices, prev, cur, inv_p, inv_q, weights, state):
    start = indptr[cur]
    deg = indptr[cur + 1] - start
    if deg == 0:
        return -1
    total = 0.0
    for i in range(deg):
        x = indices[start + i]
        if x == prev:
            w = inv_p
        elif _is_neighbor(indptr, indices, prev, x):
            w = 1.0
        else:
            w = inv_q
        total += w
        weights[i] = total
    r = next_float(state) * total
    for i in range(deg):
        if weights[i] > r:
            return indices[start + i]
    return indices[start + deg - 1]


@njit(cache=True)
def _walk_into(indptr, indices, start, length, biased, inv_p, inv_q, weights, state, out):
    out[0] = start
    n = 1
    while n < length:
        cur = out[n - 1]
        if biased and n >= 2:
            nxt = _biased_step(indptr, indices, out[n - 2], cur, inv_p, inv_q, weights, state)
        else:
            nxt = _uniform_step(indptr, indices, cur, state)
        if nxt < 0:
            break
        out[n] = nxt
        n += 1
    return n


@njit(cache=True)
def _max_degree(indptr):
    m = 0
    for v in range(len(indptr) - 1):
        d = indptr[v + 1] - indptr[v]
        if d > m:
            m = d
    return m


@njit(cache=True, parallel=True)
def _walk_batch(indptr, indices, starts, first_index, length, biased, inv_p, inv_q, seed, out, lens):
    max_deg = _max_degree(indptr)
    for i in prange(len(starts)):
        state = np.empty(1, dtype=np.uint64)
        state[0] = stream_state(seed, first_index + i)
        weights = np.empty(max(max_deg, 1), dtype=np.float64)
        lens[i] = _walk_into(indptr, indices, starts[i], length, biased, inv_p, inv_q,
                             weights, state, out[i])


def _single_walk(g: Graph, start: int, length: int, biased: bool, p: float, q: float,
                 rng: np.random.Generator) -> np.ndarray:
    if not 0 <= start < g.num_nodes:
        raise ValueError(f"invalid start node {start}")
    out = np.empty((1, length), dtype=np.int32)
    lens = np.empty(1, dtype=np.int64)
    _walk_batch(g.indptr, g.indices, np.array([start], dtype=np.int32), 0, length, biased,
                1.0 / p, 1.0 / q, np.uint64(seed_from(rng)), out, lens)
    return out[0, :lens[0]].copy()


def uniform_walk(g: Graph, start: int, length: int, rng: np.random.Generator) -> np.ndarray:
    """Truncated uniform random walk; stops early at a node with no neighbours."""
    return _single_walk(g, start, length, False, 1.0, 1.0, rng)


def biased_walk(g: Graph, start: int, length: int, p: float, q: float,
                rng: np.random.Generator) -> np.ndarray:
    """Second-order walk: returning costs ``1/p``, moving away costs ``1/q``.

    Draws from the same random stream as :func:`uniform_walk`, so with
    ``p == q == 1`` both functions return the same walk for the same ``rng``
    state.
    """
    if p <= 0 or q <= 0:
        raise ValueError("p and q must be positive")
    return _single_walk(g, start, length, True, p, q, rng)


def transition_probabilities(g: Graph, prev: int, cur: int, p: float, q: float) -> dict[int, float]:
    """Normalized second-order step distribution out of ``cur`` coming from ``prev``."""
    weights = {}
    for x in g.neighbors(cur):
        x = int(x)
        if x == prev:
            weights[x] = 1.0 / p
        elif g.has_edge(prev, x):
            weights[x] = 1.0
        else:
            weights[x] = 1.0 / q
    total = sum(weights.values())
    return {x: w / total for x, w in weights.items()}


def start_nodes(num_nodes: int, walks_per_node: int, seed: int) -> np.ndarray:
    """Start node of every walk: one fresh permutation of all nodes per pass."""
    rng = np.random.default_rng(seed)
    return np.concatenate([rng.permutation(num_nodes) for _ in range(walks_per_node)]).astype(np.int32)


def _generate_pass(g: Graph, cfg: WalkConfig, starts: np.ndarray, first_index: int):
    out = np.empty((len(starts), cfg.walk_length), dtype=np.int32)
    lens = np.empty(len(starts), dtype=np.int64)
    # stream ids are global walk indices, independent of thread count
    _walk_batch(g.indptr, g.indices, starts, first_index, cfg.walk_length, cfg.biased,
                1.0 / cfg.p, 1.0 / cfg.q, np.uint64(cfg.seed), out, lens)
    return out, lens


def generate_corpus(g: Graph, cfg: WalkConfig) -> WalkCorpus:
    """``cfg.walks_per_node`` passes over every node, pass-major order."""
    starts = start_nodes(g.num_nodes, cfg.walks_per_node, cfg.seed)
    out, lens = _generate_pass(g, cfg, starts, 0)
    offsets = np.zeros(len(starts) + 1, dtype=np.int64)
    np.cumsum(lens, out=offsets[1:])
    mask = np.arange(cfg.walk_length)[None, :] < lens[:, None]
    return WalkCorpus(out[mask], offsets)


def contexts(walk, window: int) -> Iterator[ContextPair]:
    """Every ``(walk[l], walk[l + j])`` with ``0 < |j| <= window``, clipped at the ends."""
    n = len(walk)
    for l in range(n):
        for j in range(-window, window + 1):
            if j == 0 or not 0 <= l + j < n:
                continue
            yield ContextPair(int(walk[l]), int(walk[l + j]), j)


# -- corpus files -------------------------------------------------------------

def write_corpus_header(fh, num_nodes: int, walks_per_node: int, walk_length: int) -> None:
    fh.write(_HEADER.pack(CORPUS_MAGIC, CORPUS_VERSION, num_nodes, walks_per_node, walk_length))


def write_walks(fh, corpus: WalkCorpus) -> None:
    lengths = corpus.lengths()
    buf = np.empty(len(corpus.nodes) + len(corpus), dtype="<u4")
    pos = corpus.offsets[:-1] + np.arange(len(corpus))
    buf[pos] = lengths
    mask = np.ones(len(buf), dtype=bool)
    mask[pos] = False
    buf[mask] = corpus.nodes
    fh.write(buf.tobytes())


def stream_corpus_to_file(g: Graph, cfg: WalkConfig, path, *, pass_batch: int = 1) -> None:
    """Generate the corpus pass by pass and append it to ``path``.

    Produces exactly the walks :func:`generate_corpus` would, without
    holding the whole corpus in memory.
    """
    starts = start_nodes(g.num_nodes, cfg.walks_per_node, cfg.seed)
    per = g.num_nodes * pass_batch
    with open(path, "wb") as fh:
        write_corpus_header(fh, g.num_nodes, cfg.walks_per_node, cfg.walk_length)
        for lo in range(0, len(starts), per):
            out, lens = _generate_pass(g, cfg, starts[lo:lo + per], lo)
            offsets = np.zeros(len(lens) + 1, dtype=np.int64)
            np.cumsum(lens, out=offsets[1:])
            mask = np.arange(cfg.walk_length)[None, :] < lens[:, None]
            write_walks(fh, WalkCorpus(out[mask], offsets))


def save_corpus(corpus: WalkCorpus, path, num_nodes: int, walks_per_node: int, walk_length: int) -> None:
    with open(path, "wb") as fh:
        write_corpus_header(fh, num_nodes, walks_per_node, walk_length)
        write_walks(fh, corpus)


@njit(cache=True)
def _split_records(buf):
    count = 0
    i = 0
    while i < len(buf):
        i += buf[i] + 1
        count += 1
    if i != len(buf):
        raise ValueError("corrupt corpus body")
    offsets = np.zeros(count + 1, dtype=np.int64)
    nodes = np.empty(len(buf) - count, dtype=np.int32)
    i = 0
    w = 0
    pos = 0
    while i < len(buf):
        n = buf[i]
        nodes[pos:pos + n] = buf[i + 1:i + 1 + n]
        pos += n
        w += 1
        offsets[w] = pos
        i += n + 1
    return nodes, offsets


def read_corpus_header(path) -> dict:
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated corpus header")
    magic, version, n, walks, length = _HEADER.unpack(raw)
    if magic != CORPUS_MAGIC:
        raise ValueError(f"{path}: not a walk corpus file")
    if version != CORPUS_VERSION:
        raise ValueError(f"{path}: unsupported corpus version {version}")
    return {"num_nodes": n, "walks_per_node": walks, "walk_length": length}


def load_corpus(path) -> tuple[WalkCorpus, dict]:
    header = read_corpus_header(path)
    body = np.memmap(Path(path), dtype="<u4", mode="r", offset=_HEADER.size)
    try:
        nodes, offsets = _split_records(np.asarray(body, dtype=np.int64))
    except ValueError:
        raise ValueError(f"{path}: corrupt corpus body") from None
    return WalkCorpus(nodes, offsets), header
