"""Small generated graphs used by the test suite and for quick demos."""

from __future__ import annotations

import numpy as np

from .graph import Graph, LabelMap


def stochastic_block_model(sizes, p_in: float, p_out: float,
                           rng: np.random.Generator) -> tuple[Graph, LabelMap]:
    """Undirected SBM; node ``i`` belongs to the block given by ``sizes`` order."""
    sizes = list(sizes)
    blocks = np.repeat(np.arange(len(sizes)), sizes)
    n = len(blocks)
    iu, ju = np.triu_indices(n, k=1)
    prob = np.where(blocks[iu] == blocks[ju], p_in, p_out)
    keep = rng.random(len(iu)) < prob
    g = Graph.from_edges(np.stack([iu[keep], ju[keep]], axis=1), n)
    return g, LabelMap(blocks.astype(np.int64), tuple(f"block{b}" for b in range(len(sizes))))


def collaboration_graph(num_nodes: int, num_edges: int, rng: np.random.Generator,
                        group_size: int = 20, team_sizes=(2, 3, 4, 5),
                        cross_group: float = 0.1) -> Graph:
    """Co-authorship-style graph: a union of small cliques ("papers").

    Authors are split into groups of ``group_size``; each paper picks its
    team mostly inside one group, with each member swapped for a random
    outside author with probability ``cross_group``. Papers are added until
    the graph has ``num_edges`` edges.
    """
    n_groups = max(1, num_nodes // group_size)
    group_of = rng.permutation(np.arange(num_nodes) % n_groups)
    members = [np.flatnonzero(group_of == k) for k in range(n_groups)]
    keys: set[int] = set()
    while len(keys) < num_edges:
        grp = members[rng.integers(n_groups)]
        size = min(int(rng.choice(team_sizes)), len(grp))
        team = rng.choice(grp, size=size, replace=False)
        swap = rng.random(size) < cross_group
        team[swap] = rng.integers(0, num_nodes, size=int(swap.sum()))
        team = np.unique(team)
        for i in range(len(team)):
            for j in range(i + 1, len(team)):
                keys.add(int(team[i]) * num_nodes + int(team[j]))
                if len(keys) == num_edges:
                    break
            if len(keys) == num_edges:
                break
    k = np.fromiter(keys, dtype=np.int64, count=len(keys))
    return Graph.from_edges(np.stack([k // num_nodes, k % num_nodes], axis=1), num_nodes)
