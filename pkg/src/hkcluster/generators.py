"""Built-in test instances: paths, cycles, cliques, planted bridges, random
connected graphs, and the classic 34-node karate club network."""

from __future__ import annotations

import numpy as np

from .graph import Graph

__all__ = [
    "path_graph",
    "cycle_graph",
    "complete_graph",
    "two_clique_bridge",
    "random_connected_graph",
    "karate_club_graph",
]

# Zachary's karate club (34 nodes, 78 edges), the standard 0-indexed edge set.
_KARATE_EDGES = (
    (0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (0, 6), (0, 7), (0, 8),
    (0, 10), (0, 11), (0, 12), (0, 13), (0, 17), (0, 19), (0, 21), (0, 31),
    (1, 2), (1, 3), (1, 7), (1, 13), (1, 17), (1, 19), (1, 21), (1, 30),
    (2, 3), (2, 7), (2, 8), (2, 9), (2, 13), (2, 27), (2, 28), (2, 32),
    (3, 7), (3, 12), (3, 13), (4, 6), (4, 10), (5, 6), (5, 10), (5, 16),
    (6, 16), (8, 30), (8, 32), (8, 33), (9, 33), (13, 33), (14, 32), (14, 33),
    (15, 32), (15, 33), (18, 32), (18, 33), (19, 33), (20, 32), (20, 33), (22, 32),
    (22, 33), (23, 25), (23, 27), (23, 29), (23, 32), (23, 33), (24, 25), (24, 27),
    (24, 31), (25, 31), (26, 29), (26, 33), (27, 33), (28, 31), (28, 33), (29, 32),
    (29, 33), (30, 32), (30, 33), (31, 32), (31, 33), (32, 33),
)


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle needs at least 3 nodes")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def two_clique_bridge(clique_size: int) -> Graph:
    """Two disjoint cliques {0..k-1} and {k..2k-1} joined by edge (k-1, k).

    The planted cut {0..k-1} has boundary 1 and volume k(k-1)+1.
    """
    k = clique_size
    if k < 2:
        raise ValueError("clique size must be at least 2")
    edges = [(i, j) for i in range(k) for j in range(i + 1, k)]
    edges += [(k + i, k + j) for i in range(k) for j in range(i + 1, k)]
    edges.append((k - 1, k))
    return Graph.from_edges(2 * k, edges)


def random_connected_graph(
    n: int,
    extra_edges: int = 0,
    seed: int = 0,
    max_degree: int | None = None,
) -> Graph:
    """Random spanning tree plus extra random edges; connected by construction.

    Extra edges that would duplicate, self-loop, or exceed max_degree are
    skipped after a bounded number of attempts.
    """
    rng = np.random.default_rng(seed)
    edges: set[tuple[int, int]] = set()
    deg = [0] * n
    for v in range(1, n):
        u = int(rng.integers(0, v))
        edges.add((u, v))
        deg[u] += 1
        deg[v] += 1
    attempts = 0
    added = 0
    while added < extra_edges and attempts < 20 * (extra_edges + 1):
        attempts += 1
        u = int(rng.integers(0, n))
        v = int(rng.integers(0, n))
        if u == v:
            continue
        a, b = (u, v) if u < v else (v, u)
        if (a, b) in edges:
            continue
        if max_degree is not None and (deg[a] >= max_degree or deg[b] >= max_degree):
            continue
        edges.add((a, b))
        deg[a] += 1
        deg[b] += 1
        added += 1
    return Graph.from_edges(n, edges)


def karate_club_graph() -> Graph:
    return Graph.from_edges(34, _KARATE_EDGES)
