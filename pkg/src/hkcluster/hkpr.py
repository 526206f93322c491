"""Heat kernel pagerank: exact truncated-series oracle and Monte Carlo
walk machinery shared by the serial and message-passing estimators.

The diffusion vector for seed s and time t is the endpoint distribution of
a lazy-free standard random walk whose length is Poisson(t): the series
sum_k e^{-t} t^k/k! * (chi_s P^k) with P the degree-normalized transition
matrix. "log" is the natural logarithm throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .graph import Graph

__all__ = [
    "PhkprVector",
    "exact_phkpr",
    "sample_walk_length",
    "poisson_draws",
    "serial_estimate_phkpr",
    "walk_parameters",
    "token_count",
    "step_cap",
    "truncated_length_probs",
]

# Inversion by sequential search stays exact and fast up to this mean;
# larger means are drawn as sums of independent chunks (Poisson additivity).
_INVERSION_MEAN_CAP = 30.0


@dataclass
class PhkprVector:
    """Sparse nonnegative diffusion vector over nodes.

    kind is "exact" for series evaluations (float entries summing to
    1 within the truncation tolerance) or "estimated" for Monte Carlo
    token counts (Fraction entries summing to exactly 1).
    """

    seed: int
    t: float
    entries: dict[int, float | Fraction]
    kind: str
    num_walks: int | None = None
    step_cap: int | None = None
    _meta: dict = field(default_factory=dict, repr=False, compare=False)

    def value(self, v: int):
        return self.entries.get(v, 0)

    def support(self) -> list[int]:
        return sorted(self.entries)

    def total(self):
        return sum(self.entries.values())

    def ranked_items(self) -> list[tuple[int, float | Fraction]]:
        """(node, value) pairs sorted by value descending, node ascending."""
        return sorted(self.entries.items(), key=lambda kv: (-kv[1], kv[0]))


# -- parameters --------------------------------------------------------------


def token_count(n: int, eps: float) -> int:
    """Number of walk tokens: ceil((16/eps^3) * ln n)."""
    if not 0 < eps < 1:
        raise ValueError("eps must be in (0, 1)")
    if n < 1:
        raise ValueError("n must be positive")
    return max(1, math.ceil((16.0 / eps**3) * math.log(n)))


def step_cap(eps: float, c: float = 1.0) -> int:
    """Walk-length cap: ceil(c * 2 ln(1/eps) / lnln(1/eps)).

    The double-log denominator is replaced by 1 when it is not positive
    (eps close to 1/2 makes it negative and the formula meaningless), and
    the cap is at least 1. Requires eps < 1/2.
    """
    if not 0 < eps < 0.5:
        raise ValueError("eps must be in (0, 1/2)")
    if c < 1:
        raise ValueError("c must be at least 1")
    loglog = math.log(math.log(1.0 / eps))
    denom = loglog if loglog > 0 else 1.0
    return max(1, math.ceil(c * 2.0 * math.log(1.0 / eps) / denom))


def walk_parameters(n: int, eps: float, c: float = 1.0) -> tuple[int, int]:
    """(token count r, step cap K) for graph size n and error bound eps."""
    if not 0 < eps < 0.5:
        raise ValueError("eps must be in (0, 1/2)")
    return token_count(n, eps), step_cap(eps, c)


# -- Poisson sampling ---------------------------------------------------------


def _poisson_cdf_table(t: float) -> np.ndarray:
    """CDF values F[k] = P(Poisson(t) <= k) until saturation at 1.0."""
    values = []
    p = math.exp(-t)
    total = p
    k = 0
    values.append(total)
    # float64 saturates well before this bound for any t <= cap
    limit = int(t + 40 * math.sqrt(t + 1) + 60)
    while total < 1.0 and k < limit:
        k += 1
        p *= t / k
        total += p
        values.append(min(total, 1.0))
    values[-1] = 1.0
    return np.array(values)


def poisson_draws(t: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """size i.i.d. Poisson(t) draws via inversion by sequential search.

    For t above the inversion cap the mean is split into chunks of at most
    the cap and independent chunk draws are summed, which is exact.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0:
        return np.zeros(size, dtype=np.int64)
    if t <= _INVERSION_MEAN_CAP:
        cdf = _poisson_cdf_table(t)
        u = rng.random(size)
        return np.searchsorted(cdf, u, side="left").astype(np.int64)
    pieces = math.ceil(t / _INVERSION_MEAN_CAP)
    out = np.zeros(size, dtype=np.int64)
    for i in range(pieces):
        out += poisson_draws(t / pieces, size, rng)
    return out


def sample_walk_length(t: float, rng: np.random.Generator) -> int:
    """One Poisson(t) walk length; reproducible given a seeded generator."""
    return int(poisson_draws(t, 1, rng)[0])


def _log_pmf(k: int, t: float) -> float:
    return -t + k * math.log(t) - math.lgamma(k + 1) if t > 0 else (0.0 if k == 0 else -math.inf)


def truncated_length_probs(t: float, cap: int) -> np.ndarray:
    """Probabilities of min(Poisson(t), cap): classes 0..cap-1 plus the tail."""
    probs = np.zeros(cap + 1)
    for k in range(cap):
        probs[k] = math.exp(_log_pmf(k, t))
    probs[cap] = max(0.0, 1.0 - probs[:cap].sum())
    return probs


# -- exact oracle -------------------------------------------------------------


def exact_phkpr(g: Graph, seed: int, t: float, tol: float = 1e-9) -> PhkprVector:
    """Evaluate the diffusion series, truncated when the Poisson tail mass
    drops to tol.

    Because every partial walk distribution has entries in [0, 1], the
    discarded tail bounds the per-coordinate error by tol.
    """
    if not 0 <= seed < g.node_count:
        raise ValueError(f"seed {seed} not in graph")
    if t < 0:
        raise ValueError("t must be nonnegative")
    if not 0 < tol < 1:
        raise ValueError("tol must be in (0, 1)")
    n = g.node_count
    flat, offsets, degrees = g.csr_arrays()
    # source node of each directed arc, for the scatter step
    src = np.repeat(np.arange(n, dtype=np.int64), degrees)
    safe_deg = np.maximum(degrees, 1)

    walk = np.zeros(n)
    walk[seed] = 1.0
    acc = np.zeros(n)
    cum = 0.0
    k = 0
    # beyond this index the tail is below float64 resolution; stop even if
    # accumulated rounding keeps cum a hair under the target
    hard_stop = int(t + 60.0 * math.sqrt(t + 1.0) + 200.0)
    while cum < 1.0 - tol and k <= hard_stop:
        w = math.exp(_log_pmf(k, t)) if t > 0 else (1.0 if k == 0 else 0.0)
        acc += w * walk
        cum += w
        if cum >= 1.0 - tol:
            break
        stepped = np.zeros(n)
        contrib = walk / safe_deg
        np.add.at(stepped, flat, contrib[src])
        # an isolated node (only possible when n == 1) keeps its mass
        stepped[degrees == 0] += walk[degrees == 0]
        walk = stepped
        k += 1
    entries = {int(v): float(acc[v]) for v in np.nonzero(acc)[0]}
    vec = PhkprVector(seed=seed, t=t, entries=entries, kind="exact")
    vec._meta["series_terms"] = k + 1
    vec._meta["tol"] = tol
    return vec


# -- serial Monte Carlo estimator ---------------------------------------------


def serial_estimate_phkpr(
    g: Graph,
    seed: int,
    t: float,
    eps: float,
    rng: np.random.Generator | int,
    c: float = 1.0,
) -> PhkprVector:
    """Estimate the diffusion by r independent random walks of length
    min(Poisson(t), K), counting end vertices.

    Entries are exact rationals count/r, so they sum to exactly 1. Walks
    are executed as vectorized independent token steps from one stream.
    """
    if not 0 <= seed < g.node_count:
        raise ValueError(f"seed {seed} not in graph")
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(int(rng))
    r, cap = walk_parameters(g.node_count, eps, c)
    lengths = np.minimum(poisson_draws(t, r, rng), cap)
    flat, offsets, degrees = g.csr_arrays()
    pos = np.full(r, seed, dtype=np.int64)
    for step in range(1, cap + 1):
        moving = lengths >= step
        cur = pos[moving]
        if cur.size == 0:
            break
        d = degrees[cur]
        ok = d > 0  # isolated node (n == 1 only) holds its tokens
        if not ok.all():
            cur = cur[ok]
            if cur.size == 0:
                continue
            pick = rng.integers(0, degrees[cur])
            idx = np.flatnonzero(moving)[ok]
            pos[idx] = flat[offsets[cur] + pick]
        else:
            pick = rng.integers(0, d)
            pos[moving] = flat[offsets[cur] + pick]
    counts = np.bincount(pos, minlength=g.node_count)
    entries = {int(v): Fraction(int(counts[v]), r) for v in np.nonzero(counts)[0]}
    return PhkprVector(
        seed=seed, t=t, entries=entries, kind="estimated", num_walks=r, step_cap=cap
    )
