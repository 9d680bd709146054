"""The two lazy single-bond-flip Metropolis chains.

Both chains pick a uniform edge e, propose toggling it in the current
subset, and accept with probability (1/2) * min(1, weight ratio); rejected
mass stays on the current state.  The rank-weighted chain tracks the
bipartite adjacency rank through single-entry flips; the random-cluster
chain tracks the component count through a local bridge test.  Acceptance
probabilities are exact rationals compared against exact uniform draws, so
a seeded run is bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .gf2 import RankProfile, bipartite_adjacency, rank, sample_left_nullspace
from .graphs import BipartiteGraph, EdgeSubset, Graph, components
from .rng import SplitMix64

RWS = "rws"
RC = "rc"


@dataclass(frozen=True)
class ChainParams:
    """family 'rws' uses (lam, mu) rank weights on a bipartite graph;
    family 'rc' uses (q, mu) component weights on any graph.  Both chains
    are specified for strictly positive weights."""

    family: str
    lam: Fraction  # lam for rws, q for rc
    mu: Fraction

    def __post_init__(self):
        if self.family not in (RWS, RC):
            raise ValueError(f"unknown chain family {self.family!r}")
        object.__setattr__(self, "lam", Fraction(self.lam))
        object.__setattr__(self, "mu", Fraction(self.mu))
        if self.lam <= 0 or self.mu <= 0:
            raise ValueError("chain parameters must be strictly positive")


class ChainState:
    """Single-owner mutable state: current subset plus its cached statistic
    (bipartite rank for rws, component count for rc)."""

    def __init__(self, g: Graph | BipartiteGraph, params: ChainParams, subset: EdgeSubset = 0):
        self.params = params
        self.steps = 0
        self.accepts = 0
        self.subset = subset
        if params.family == RWS:
            if not isinstance(g, BipartiteGraph):
                raise ValueError("the rank-weighted chain needs a bipartite graph")
            self.bip = g
            self.graph = g.graph
            self.oriented = g.oriented_edges()
            self.profile = RankProfile(bipartite_adjacency(g, subset))
        else:
            self.graph = g.graph if isinstance(g, BipartiteGraph) else g
            self.bip = None
            kappa, _ = components(self.graph, subset)
            self.kappa = kappa
        self.m = self.graph.m
        if self.m == 0:
            raise ValueError("chain needs at least one edge")

    @property
    def statistic(self) -> int:
        """Cached rank (rws) or component count (rc)."""
        return self.profile.rank if self.params.family == RWS else self.kappa

    def statistic_from_scratch(self) -> int:
        if self.params.family == RWS:
            return rank(bipartite_adjacency(self.bip, self.subset))
        kappa, _ = components(self.graph, self.subset)
        return kappa

    # -- rc component delta -------------------------------------------------

    def _adj_in_subset(self, subset: EdgeSubset) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.graph.n)]
        for i, (u, v) in enumerate(self.graph.edges):
            if (subset >> i) & 1:
                adj[u].append(v)
                adj[v].append(u)
        return adj

    def _connected_in(self, subset: EdgeSubset, src: int, dst: int) -> bool:
        if src == dst:
            return True
        adj = self._adj_in_subset(subset)
        seen = bytearray(self.graph.n)
        seen[src] = 1
        stack = [src]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y == dst:
                    return True
                if not seen[y]:
                    seen[y] = 1
                    stack.append(y)
        return False

    def rc_delta_kappa(self, e: int) -> int:
        """Component-count change if edge e were toggled: adding an edge
        joins two components iff its endpoints are separated; removing one
        splits iff it is a bridge of the current subset."""
        u, v = self.graph.edges[e]
        if (self.subset >> e) & 1:
            return 1 if not self._connected_in(self.subset & ~(1 << e), u, v) else 0
        return -1 if not self._connected_in(self.subset, u, v) else 0

    # -- one step ------------------------------------------------------------

    def step(self, rng: SplitMix64) -> None:
        e = rng.randrange(self.m)
        params = self.params
        if params.family == RWS:
            ui, wi = self.oriented[e]
            old_rank = self.profile.rank
            new_rank = self.profile.flip_entry(ui, wi)
            d_size = -1 if (self.subset >> e) & 1 else 1
            ratio = params.lam ** (new_rank - old_rank) * params.mu**d_size
            accept = Fraction(1, 2) * min(Fraction(1), ratio)
            if rng.bernoulli(accept):
                self.subset ^= 1 << e
                self.accepts += 1
            else:
                self.profile.flip_entry(ui, wi)  # undo (flips are involutions)
        else:
            d_kappa = self.rc_delta_kappa(e)
            d_size = -1 if (self.subset >> e) & 1 else 1
            ratio = params.lam**d_kappa * params.mu**d_size
            accept = Fraction(1, 2) * min(Fraction(1), ratio)
            if rng.bernoulli(accept):
                self.subset ^= 1 << e
                self.kappa += d_kappa
                self.accepts += 1
        self.steps += 1


def step_rws(state: ChainState, rng: SplitMix64) -> ChainState:
    if state.params.family != RWS:
        raise ValueError("state is not a rank-weighted chain")
    state.step(rng)
    return state


def step_rc(state: ChainState, rng: SplitMix64) -> ChainState:
    if state.params.family != RC:
        raise ValueError("state is not a random-cluster chain")
    state.step(rng)
    return state


@dataclass
class RunResult:
    final: ChainState
    samples: list[EdgeSubset] = field(default_factory=list)
    acceptance_rate: float = 0.0


def run(
    g: Graph | BipartiteGraph,
    params: ChainParams,
    steps: int,
    seed: int,
    initial: EdgeSubset = 0,
    burnin: int = 0,
    thin: int = 0,
    debug_check: bool = False,
) -> RunResult:
    """Run the chain for ``steps`` steps, deterministically in ``seed``.

    With thin > 0, the state is recorded every ``thin`` steps once past
    ``burnin``.  ``debug_check`` recomputes the cached statistic from
    scratch after every step.
    """
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    state = ChainState(g, params, initial)
    rng = SplitMix64(seed)
    samples: list[EdgeSubset] = []
    for t in range(steps):
        state.step(rng)
        if debug_check and state.statistic != state.statistic_from_scratch():
            raise AssertionError(f"cached statistic diverged at step {t}")
        if thin > 0 and t >= burnin and (t - burnin) % thin == thin - 1:
            samples.append(state.subset)
    rate = state.accepts / state.steps if state.steps else 0.0
    return RunResult(state, samples, rate)


def bis_sample_bridge(
    b: BipartiteGraph, rws_sample: EdgeSubset, rng: SplitMix64
) -> tuple[int, int]:
    """Turn one rank-weighted sample (at lam=1/2, mu=1) into one uniform
    independent set, returned as (U-side bitmask, W-side bitmask) over side
    positions.

    The U part is a uniform left-nullspace vector of the sample's bipartite
    adjacency matrix; the W part keeps every W vertex seeing a chosen U
    vertex at 0 and fills the rest with fair coin flips.
    """
    mat = bipartite_adjacency(b, rws_sample)
    u_vec = sample_left_nullspace(mat, rng)
    full = bipartite_adjacency(b)  # blocked W vertices come from the whole graph
    blocked = 0
    for ui in range(full.rows):
        if (u_vec >> ui) & 1:
            blocked |= full.data[ui]
    w_vec = 0
    for wi in range(len(b.side_w)):
        if not (blocked >> wi) & 1 and rng.randbits(1):
            w_vec |= 1 << wi
    return u_vec, w_vec
