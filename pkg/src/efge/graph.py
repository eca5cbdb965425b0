"""Undirected, unweighted graphs stored in CSR form.

Node ids are dense integers assigned in order of first appearance in the
input; the original tokens are kept so results can be written back out
under the names the user supplied.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, TextIO

import numpy as np
from numba import njit
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

COMMENT_PREFIXES = ("#", "%")


class GraphFormatError(ValueError):
    """Raised when an edge list or label file cannot be parsed."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected graph.

    ``indptr``/``indices`` hold the symmetric adjacency with every neighbour
    list sorted ascending; ``tokens[i]`` is the original name of node ``i``.
    """

    indptr: np.ndarray
    indices: np.ndarray
    tokens: tuple[str, ...]
    _index: dict[str, int] = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        if self._index is None:
            object.__setattr__(self, "_index", {t: i for i, t in enumerate(self.tokens)})
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)

    @classmethod
    def from_edges(cls, edges, num_nodes: int, tokens: Iterable[str] | None = None) -> "Graph":
        """Build a graph from an ``(m, 2)`` integer array of endpoints.

        Self-loops are dropped and duplicate edges (in either direction)
        collapse to one.
        """
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if edges.size and (edges.min() < 0 or edges.max() >= num_nodes):
            raise ValueError("edge endpoint out of range")
        edges = edges[edges[:, 0] != edges[:, 1]]
        lo = np.minimum(edges[:, 0], edges[:, 1])
        hi = np.maximum(edges[:, 0], edges[:, 1])
        keys = np.unique(lo * num_nodes + hi)
        lo, hi = keys // num_nodes, keys % num_nodes
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(num_nodes + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=num_nodes), out=indptr[1:])
        if tokens is None:
            tokens = (str(i) for i in range(num_nodes))
        tokens = tuple(tokens)
        if len(tokens) != num_nodes:
            raise ValueError("token count does not match node count")
        return cls(indptr, dst.astype(np.int32), tokens)

    @property
    def num_nodes(self) -> int:
        return len(self.indptr) - 1

    @property
    def num_edges(self) -> int:
        return len(self.indices) // 2

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self.neighbors(u)
        i = np.searchsorted(nbrs, v)
        return bool(i < len(nbrs) and nbrs[i] == v)

    def edges(self) -> np.ndarray:
        """Each undirected edge once, as ``(u, v)`` with ``u < v``."""
        src = np.repeat(np.arange(self.num_nodes, dtype=np.int64), self.degrees())
        mask = src < self.indices
        return np.stack([src[mask], self.indices[mask].astype(np.int64)], axis=1)

    def node_id(self, token: str) -> int:
        return self._index[token]

    def subgraph(self, nodes) -> "Graph":
        """Induced subgraph on ``nodes``; new id ``i`` is old id ``nodes[i]``."""
        nodes = np.asarray(nodes, dtype=np.int64)
        remap = np.full(self.num_nodes, -1, dtype=np.int64)
        remap[nodes] = np.arange(len(nodes))
        e = self.edges()
        keep = (remap[e[:, 0]] >= 0) & (remap[e[:, 1]] >= 0)
        return Graph.from_edges(remap[e[keep]], len(nodes), [self.tokens[i] for i in nodes])

    def without_edges(self, removed) -> "Graph":
        removed = np.asarray(removed, dtype=np.int64).reshape(-1, 2)
        n = self.num_nodes
        drop = np.minimum(removed[:, 0], removed[:, 1]) * n + np.maximum(removed[:, 0], removed[:, 1])
        e = self.edges()
        keep = ~np.isin(e[:, 0] * n + e[:, 1], drop)
        return Graph.from_edges(e[keep], n, self.tokens)

    def to_scipy(self) -> csr_matrix:
        data = np.ones(len(self.indices), dtype=np.int8)
        return csr_matrix((data, self.indices, self.indptr), shape=(self.num_nodes,) * 2)


@dataclass(frozen=True)
class LabelMap:
    """Single label per node; ``labels[v] == -1`` marks an unlabeled node."""

    labels: np.ndarray
    label_tokens: tuple[str, ...]

    @property
    def label_count(self) -> int:
        return len(self.label_tokens)

    def labeled_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.labels >= 0)


@dataclass(frozen=True)
class GraphStats:
    nodes: int
    edges: int
    components: int
    avg_degree: float
    density: float

    def as_dict(self) -> dict:
        return {
            "nodes": self.nodes,
            "edges": self.edges,
            "components": self.components,
            "avg_degree": self.avg_degree,
            "density": self.density,
        }


def _data_lines(source: TextIO):
    for lineno, line in enumerate(source, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith(COMMENT_PREFIXES):
            continue
        yield lineno, stripped.split()


def load_edge_list(source: TextIO, extra_nodes: Iterable[str] = ()) -> Graph:
    """Parse a whitespace-separated edge list.

    Lines starting with ``#`` or ``%`` are comments. Tokens listed in
    ``extra_nodes`` that never occur in an edge are appended as isolated
    nodes after all edge tokens.
    """
    index: dict[str, int] = {}
    pairs = []
    for lineno, parts in _data_lines(source):
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected 2 tokens, got {len(parts)}")
        ids = []
        for tok in parts:
            if tok not in index:
                index[tok] = len(index)
            ids.append(index[tok])
        pairs.append(ids)
    for tok in extra_nodes:
        if tok not in index:
            index[tok] = len(index)
    if not index:
        raise GraphFormatError("edge list is empty")
    return Graph.from_edges(np.array(pairs, dtype=np.int64).reshape(-1, 2), len(index), index.keys())


def load_labels(source: TextIO, graph: Graph) -> LabelMap:
    """Parse ``node label`` lines; label ids follow order of first appearance."""
    return parse_labels(source, graph._index, graph.num_nodes)


def parse_labels(source: TextIO, index: Mapping[str, int], num_nodes: int) -> LabelMap:
    """Like :func:`load_labels` but against an explicit token -> id mapping."""
    labels = np.full(num_nodes, -1, dtype=np.int64)
    label_index: dict[str, int] = {}
    for lineno, parts in _data_lines(source):
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected 2 tokens, got {len(parts)}")
        node_tok, label_tok = parts
        if node_tok not in index:
            raise GraphFormatError(f"line {lineno}: unknown node {node_tok!r}")
        v = index[node_tok]
        lab = label_index.setdefault(label_tok, len(label_index))
        if labels[v] not in (-1, lab):
            raise GraphFormatError(f"line {lineno}: node {node_tok!r} has more than one label")
        labels[v] = lab
    if not label_index:
        raise GraphFormatError("label file is empty")
    return LabelMap(labels, tuple(label_index))


def label_file_tokens(source: TextIO) -> list[str]:
    """Node tokens mentioned in a label file, in file order."""
    return [parts[0] for _, parts in _data_lines(source) if parts]


def component_labels(g: Graph) -> tuple[int, np.ndarray]:
    return connected_components(g.to_scipy(), directed=False)


def is_connected(g: Graph) -> bool:
    return g.num_nodes > 0 and component_labels(g)[0] == 1


def graph_stats(g: Graph) -> GraphStats:
    n, m = g.num_nodes, g.num_edges
    if n == 0:
        raise ValueError("empty graph")
    ncomp, _ = component_labels(g)
    density = 2.0 * m / (n * (n - 1)) if n > 1 else 0.0
    return GraphStats(nodes=n, edges=m, components=int(ncomp), avg_degree=2.0 * m / n, density=density)


def largest_connected_component(g: Graph) -> tuple[Graph, np.ndarray]:
    """Induced subgraph of the largest component.

    Returns the subgraph and an array mapping each new id to its id in
    ``g``. Among equally large components the one containing the smallest
    node id wins.
    """
    if g.num_nodes == 0:
        raise ValueError("empty graph")
    ncomp, comp = component_labels(g)
    sizes = np.bincount(comp, minlength=ncomp)
    first_member = np.full(ncomp, g.num_nodes, dtype=np.int64)
    np.minimum.at(first_member, comp, np.arange(g.num_nodes))
    best = min(range(ncomp), key=lambda c: (-sizes[c], first_member[c]))
    nodes = np.flatnonzero(comp == best)
    if ncomp == 1:
        return g, nodes
    return g.subgraph(nodes), nodes


@njit(cache=True)
def _still_connected(indptr, indices, edge_of_slot, alive, u, v, seen, stamp, queue_u, queue_v):
    # Alternate BFS from both endpoints, skipping dead edges. Stops once the
    # frontiers meet or the smaller side is exhausted.
    seen[u] = stamp
    seen[v] = -stamp
    queue_u[0] = u
    queue_v[0] = v
    hu, tu, hv, tv = 0, 1, 0, 1
    while hu < tu and hv < tv:
        if tu - hu <= tv - hv:
            x = queue_u[hu]
            hu += 1
            for s in range(indptr[x], indptr[x + 1]):
                if not alive[edge_of_slot[s]]:
                    continue
                y = indices[s]
                if seen[y] == -stamp:
                    return True
                if seen[y] != stamp:
                    seen[y] = stamp
                    queue_u[tu] = y
                    tu += 1
        else:
            x = queue_v[hv]
            hv += 1
            for s in range(indptr[x], indptr[x + 1]):
                if not alive[edge_of_slot[s]]:
                    continue
                y = indices[s]
                if seen[y] == stamp:
                    return True
                if seen[y] != -stamp:
                    seen[y] = -stamp
                    queue_v[tv] = y
                    tv += 1
    return False


@njit(cache=True)
def _remove_non_bridges(indptr, indices, edge_of_slot, eu, ev, order, target):
    n = len(indptr) - 1
    alive = np.ones(len(eu), dtype=np.bool_)
    seen = np.zeros(n, dtype=np.int64)
    queue_u = np.empty(n, dtype=np.int64)
    queue_v = np.empty(n, dtype=np.int64)
    removed = np.empty(target, dtype=np.int64)
    count = 0
    stamp = 0
    for e in order:
        if count == target:
            break
        alive[e] = False
        stamp += 1
        if _still_connected(indptr, indices, edge_of_slot, alive, eu[e], ev[e],
                            seen, stamp, queue_u, queue_v):
            removed[count] = e
            count += 1
        else:
            alive[e] = True
    return removed[:count]


def remove_edges_keep_connected(g: Graph, fraction: float, rng: np.random.Generator):
    """Randomly delete ``floor(fraction * |E|)`` edges without disconnecting ``g``.

    Edges are visited in a uniformly random order and removed whenever they
    are not a bridge of the current residual graph. Because removing edges
    can only turn non-bridges into bridges, this picks each removed edge
    uniformly among the current non-bridges. If too few non-bridges exist
    the removal stops short; ``len(removed)`` is the achieved count.

    Returns ``(residual, removed)`` where ``removed`` is an ``(r, 2)`` array.
    """
    if not 0 < fraction < 1:
        raise ValueError("fraction must lie in (0, 1)")
    if not is_connected(g):
        raise ValueError("input graph is not connected")
    edges = g.edges()
    m = len(edges)
    target = int(np.floor(fraction * m))
    n = g.num_nodes
    # map every CSR slot to its undirected edge id
    src = np.repeat(np.arange(n, dtype=np.int64), g.degrees())
    dst = g.indices.astype(np.int64)
    key = np.minimum(src, dst) * n + np.maximum(src, dst)
    edge_of_slot = np.searchsorted(edges[:, 0] * n + edges[:, 1], key)
    order = rng.permutation(m)
    removed_ids = _remove_non_bridges(g.indptr, g.indices, edge_of_slot,
                                      edges[:, 0], edges[:, 1], order, target)
    removed = edges[removed_ids]
    return g.without_edges(removed), removed
