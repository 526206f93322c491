"""Shared oracles for the test suite.

These deliberately take different routes than the library: the diffusion
oracle uses dense explicit matrix powers with scipy Poisson weights, and
the sweep oracle rescans every prefix from scratch.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from scipy import stats as sps

from hkcluster import Graph, PhkprVector
from hkcluster.generators import random_connected_graph


def transition_matrix(g: Graph) -> np.ndarray:
    n = g.node_count
    P = np.zeros((n, n))
    for v in range(n):
        d = g.degree(v)
        for w in g.adjacency[v]:
            P[v, w] = 1.0 / d
    return P


def dense_phkpr(g: Graph, seed: int, t: float, tol: float) -> np.ndarray:
    """Poisson-weighted explicit matrix powers, truncated at tail mass tol."""
    n = g.node_count
    P = transition_matrix(g)
    if t == 0:
        last = 0
    else:
        last = int(sps.poisson.ppf(1.0 - tol, t))
        while sps.poisson.sf(last, t) > tol:
            last += 1
    vec = np.zeros(n)
    vec[seed] = 1.0
    acc = np.zeros(n)
    for k in range(last + 1):
        acc += sps.poisson.pmf(k, t) * vec
        vec = vec @ P
    return acc


def direct_prefix_stats(g: Graph, ranked) -> list[tuple[int, int]]:
    """(volume, boundary) for every prefix of the ranking, by direct scan."""
    out = []
    members: set[int] = set()
    for v in ranked:
        members.add(v)
        vol = sum(g.degree(u) for u in members)
        boundary = sum(1 for u in members for w in g.adjacency[u] if w not in members)
        out.append((vol, boundary))
    return out


def eps_approximate(exact: dict[int, float], estimate: dict, eps: float, n: int) -> bool:
    """Multiplicative (1 +- eps) with additive eps slack, and zero estimates
    only where the true value is at most eps."""
    for v in range(n):
        true = float(exact.get(v, 0.0))
        est = float(estimate.get(v, 0))
        if est == 0 and true > eps:
            return False
        if not ((1 - eps) * true - eps <= est <= (1 + eps) * true + eps):
            return False
    return True


def random_sparse_vector(g: Graph, rng: np.random.Generator, denom: int = 1000) -> PhkprVector:
    """Random nonnegative sparse rational vector with a valid seed node."""
    n = g.node_count
    size = int(rng.integers(1, max(2, n // 2 + 1)))
    nodes = rng.choice(n, size=size, replace=False)
    counts = rng.integers(1, denom, size=size)
    entries = {int(v): Fraction(int(c), denom) for v, c in zip(nodes, counts)}
    return PhkprVector(
        seed=int(min(entries)), t=1.0, entries=entries, kind="estimated"
    )


def random_graph_pool(count: int, max_n: int, base_seed: int = 0) -> list[Graph]:
    graphs = []
    rng = np.random.default_rng(base_seed)
    while len(graphs) < count:
        n = int(rng.integers(4, max_n + 1))
        extra = int(rng.integers(0, 2 * n))
        graphs.append(random_connected_graph(n, extra, seed=int(rng.integers(0, 2**31))))
    return graphs
