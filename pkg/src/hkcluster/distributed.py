"""Parallel random-walk diffusion as a message-passing protocol.

The seed draws r truncated Poisson walk lengths up front; in each of K
rounds every node forwards its live tokens to uniformly random neighbors
and tokens whose budget is spent retire in place. Final token counts
divided by r estimate the diffusion vector.

Tokens carry no node IDs. Tokens with equal remaining budget crossing the
same edge in the same round are merged into one (remaining, count) batch,
and a batch leaving a node is split multinomially across its neighbors, so
the per-token walk law is preserved while per-edge traffic stays at one
small message per class.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .congest import NodeInfo, Protocol, RoundContext, RoundStats, SimConfig, run_protocol, uint_bits
from .graph import Graph
from .hkpr import (
    PhkprVector,
    exact_phkpr,
    serial_estimate_phkpr,
    truncated_length_probs,
    walk_parameters,
)

__all__ = [
    "TokenBatch",
    "TokenWalkProtocol",
    "estimate_phkpr_distributed",
    "distribution_equivalence_check",
    "EquivalenceReport",
]


@dataclass(frozen=True)
class TokenBatch:
    """Aggregate of identical walk tokens crossing one edge."""

    remaining_steps: int
    count: int

    @property
    def bits(self) -> int:
        return uint_bits(self.remaining_steps, self.count)


@dataclass
class _WalkState:
    live: dict[int, int] = field(default_factory=dict)  # remaining -> count
    retired: int = 0


class TokenWalkProtocol(Protocol):
    """K-round token forwarding; every node terminates at round K."""

    def __init__(self, seed_node: int, t: float, r: int, cap: int, init_seed: int):
        self.seed_node = seed_node
        self.t = t
        self.r = r
        self.cap = cap
        self.init_seed = init_seed
        self._pvals: dict[int, np.ndarray] = {}

    def _uniform_pvals(self, degree: int) -> np.ndarray:
        p = self._pvals.get(degree)
        if p is None:
            p = np.full(degree, 1.0 / degree)
            self._pvals[degree] = p
        return p

    def initial_state(self, info: NodeInfo) -> _WalkState:
        state = _WalkState()
        if info.node == self.seed_node:
            rng = np.random.default_rng((self.init_seed, 0x117))
            probs = truncated_length_probs(self.t, self.cap)
            counts = rng.multinomial(self.r, probs)
            state.retired = int(counts[0])
            for length in range(1, self.cap + 1):
                if counts[length]:
                    state.live[length] = int(counts[length])
        return state

    def handle_round(self, info, state: _WalkState, inbox, ctx: RoundContext):
        for _, batch in inbox:
            if batch.remaining_steps == 0:
                state.retired += batch.count
            else:
                state.live[batch.remaining_steps] = (
                    state.live.get(batch.remaining_steps, 0) + batch.count
                )
        if not state.live:
            return []
        out = []
        if info.degree == 0:  # single-node graph: walks cannot move
            state.retired += sum(state.live.values())
            state.live.clear()
            return out
        for remaining in sorted(state.live):
            count = state.live[remaining]
            split = ctx.rng.multinomial(count, self._uniform_pvals(info.degree))
            batch_left = remaining - 1
            for i, q in enumerate(split):
                if q:
                    batch = TokenBatch(batch_left, int(q))
                    out.append((info.neighbors[i], batch, batch.bits))
        state.live.clear()
        return out

    def finished(self, info, state, pending, round_no: int) -> bool:
        return round_no >= self.cap

    def finalize(self, info, state: _WalkState, pending) -> int:
        total = state.retired
        for _, batch in pending:
            total += batch.count  # all in-flight batches are spent at round K
        return total


def estimate_phkpr_distributed(
    g: Graph,
    seed_node: int,
    t: float,
    eps: float,
    config: SimConfig,
    c: float = 1.0,
    trace: list | None = None,
) -> tuple[PhkprVector, RoundStats]:
    """Run the token-walk protocol and return (estimate, round ledger).

    In paper mode the ledger reports exactly K rounds, independent of the
    graph size and of t.
    """
    if not 0 <= seed_node < g.node_count:
        raise ValueError(f"seed node {seed_node} not in graph")
    if t < 0:
        raise ValueError("t must be nonnegative")
    r, cap = walk_parameters(g.node_count, eps, c)
    protocol = TokenWalkProtocol(seed_node, t, r, cap, init_seed=config.seed)
    counts, stats = run_protocol(g, protocol, config, trace=trace)
    entries = {v: Fraction(cnt, r) for v, cnt in counts.items() if cnt > 0}
    vec = PhkprVector(
        seed=seed_node,
        t=t,
        entries=entries,
        kind="estimated",
        num_walks=r,
        step_cap=cap,
    )
    return vec, stats


@dataclass
class EquivalenceReport:
    """Serial vs. message-passing estimator means against the exact vector."""

    trials: int
    serial_mean: dict[int, float]
    distributed_mean: dict[int, float]
    max_dev_serial: float
    max_dev_distributed: float


def distribution_equivalence_check(
    g: Graph,
    seed_node: int,
    t: float,
    eps: float,
    trials: int,
    base_seed: int = 0,
) -> EquivalenceReport:
    """Average both estimators over many seeds and compare per-node means
    with the exact series oracle. Intended for small graphs (n <= 50)."""
    if g.node_count > 50:
        raise ValueError("equivalence check is a desk-scale harness (n <= 50)")
    exact = exact_phkpr(g, seed_node, t, tol=1e-12)
    n = g.node_count
    serial_acc = np.zeros(n)
    dist_acc = np.zeros(n)
    for i in range(trials):
        sv = serial_estimate_phkpr(g, seed_node, t, eps, rng=base_seed * 1_000_003 + i)
        for v, val in sv.entries.items():
            serial_acc[v] += float(val)
        dv, _ = estimate_phkpr_distributed(
            g, seed_node, t, eps, SimConfig(seed=base_seed).derived(0xE0, i)
        )
        for v, val in dv.entries.items():
            dist_acc[v] += float(val)
    serial_acc /= trials
    dist_acc /= trials
    exact_arr = np.zeros(n)
    for v, val in exact.entries.items():
        exact_arr[v] = val
    return EquivalenceReport(
        trials=trials,
        serial_mean={v: float(serial_acc[v]) for v in range(n) if serial_acc[v] > 0},
        distributed_mean={v: float(dist_acc[v]) for v in range(n) if dist_acc[v] > 0},
        max_dev_serial=float(np.max(np.abs(serial_acc - exact_arr))),
        max_dev_distributed=float(np.max(np.abs(dist_acc - exact_arr))),
    )
