"""Edge orderings, canonical paths, exact congestion, and mixing diagnostics.

State spaces are the 2^m edge subsets of a small graph.  Stationary weights
are kept as exact (scaled) integers so congestion and detailed balance are
exact rationals; only total-variation curves run in float64 (numpy pairwise
summation keeps the accumulated error around 1e-12, orders of magnitude
below any tolerance used on top of it).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

import numpy as np
from scipy.sparse import csr_matrix

from .chains import RWS, ChainParams
from .gf2 import RankProfile, zero_matrix
from .graphs import (
    BipartiteGraph,
    EdgeSubset,
    Graph,
    LimitExceededError,
    TreeDecomposition,
    bipartition_of,
    components,
)

OPTIMAL_WIDTH_LIMIT = 9
CONGESTION_LIMIT = 13
CHAIN_STATE_LIMIT = 16
FULL_START_SWEEP_LIMIT = 12


@dataclass(frozen=True)
class EdgeOrdering:
    """A permutation of the edge ids with its dangerous-vertex profile.

    ``perm[t]`` is the edge id placed at position t (0-indexed).
    ``profile[c]`` counts the vertices with an incident edge strictly before
    position c and another at or after position c; ``width`` is the maximum.
    """

    perm: tuple[int, ...]
    profile: tuple[int, ...]
    width: int


def linear_width_of_ordering(g: Graph, perm) -> EdgeOrdering:
    perm = tuple(perm)
    if sorted(perm) != list(range(g.m)):
        raise ValueError("not a permutation of the edge ids")
    first = [g.m] * g.n
    last = [-1] * g.n
    for pos, eid in enumerate(perm):
        for v in g.edges[eid]:
            if first[v] > pos:
                first[v] = pos
            if last[v] < pos:
                last[v] = pos
    # vertex v is dangerous at cut c iff first[v] < c <= last[v]
    diff = [0] * (g.m + 1)
    for v in range(g.n):
        if last[v] > first[v]:
            diff[first[v] + 1] += 1
            diff[last[v] + 1] -= 1
    profile = []
    cur = 0
    for c in range(g.m):
        cur += diff[c]
        profile.append(cur)
    width = max(profile, default=0)
    return EdgeOrdering(perm, tuple(profile), width)


def natural_ordering(g: Graph) -> EdgeOrdering:
    return linear_width_of_ordering(g, range(g.m))


def _forest_dfs_vertex_order(t: Graph) -> tuple[list[int], list[int]]:
    """(vertex discovery order, edge discovery order) of a smallest-subtree-
    first DFS.  Each component is rooted at its smallest vertex id; ties
    among equal subtree sizes break toward the smaller vertex id."""
    kappa, comps = components(t, t.full_subset())
    if t.m != t.n - kappa:
        raise ValueError("input has a cycle; expected a forest")
    inc = t.incidence()
    size = [1] * t.n
    vertex_order: list[int] = []
    edge_order: list[int] = []
    for comp in sorted(comps, key=min):
        root = min(comp)
        # iterative post-order for subtree sizes
        order = [root]
        parent = {root: -1}
        for x in order:
            for _, y in inc[x]:
                if y not in parent:
                    parent[y] = x
                    order.append(y)
        for x in reversed(order):
            if parent[x] != -1:
                size[parent[x]] += size[x]
        # DFS, smaller subtrees first
        stack = [root]
        seen = {root}
        via_edge = {root: -1}
        while stack:
            x = stack.pop()
            vertex_order.append(x)
            if via_edge[x] != -1:
                edge_order.append(via_edge[x])
            children = [(size[y], y, eid) for eid, y in inc[x] if y not in seen]
            for _, y, eid in sorted(children, reverse=True):
                seen.add(y)
                via_edge[y] = eid
                stack.append(y)
    return vertex_order, edge_order


def dfs_tree_ordering(t: Graph) -> EdgeOrdering:
    """Edge discovery order of a DFS that explores smaller subtrees first;
    its width is at most floor(log2 n) on a tree."""
    _, edge_order = _forest_dfs_vertex_order(t)
    return linear_width_of_ordering(t, edge_order)


def treedec_ordering(g: Graph, td: TreeDecomposition) -> EdgeOrdering:
    """Order edges by the first bag containing them, bags visited in
    smallest-subtree-first DFS order; edge ids break ties inside a bag.
    The width is at most (decomposition width + 1) * (floor(log2 n) + 1).
    """
    td.validate_for(g)
    bag_order, _ = _forest_dfs_vertex_order(td.tree)
    bagsets = [set(b) for b in td.bags]
    assigned: list[tuple[int, int]] = []
    for eid, (u, v) in enumerate(g.edges):
        for pos, h in enumerate(bag_order):
            if u in bagsets[h] and v in bagsets[h]:
                assigned.append((pos, eid))
                break
        else:
            raise ValueError("decomposition does not cover all edges")
    perm = [eid for _, eid in sorted(assigned)]
    return linear_width_of_ordering(g, perm)


def optimal_linear_width(g: Graph) -> int:
    """Exact minimum width over all m! orderings (tiny instances only)."""
    if g.m > OPTIMAL_WIDTH_LIMIT:
        raise LimitExceededError(
            f"exhaustive width search limited to {OPTIMAL_WIDTH_LIMIT} edges"
        )
    best = g.m + 1
    for perm in permutations(range(g.m)):
        w = linear_width_of_ordering(g, perm).width
        if w < best:
            best = w
            if best == 0:
                break
    return best


# ---------------------------------------------------------------------------
# Canonical paths


def canonical_path(
    start: EdgeSubset, finish: EdgeSubset, ordering: EdgeOrdering
) -> list[EdgeSubset]:
    """States from start to finish, flipping the differing edges in ordering
    position order; consecutive states differ in exactly one edge."""
    states = [start]
    cur = start
    diff = start ^ finish
    for eid in ordering.perm:
        if (diff >> eid) & 1:
            cur ^= 1 << eid
            states.append(cur)
    return states


# ---------------------------------------------------------------------------
# Exact chains on the full state space


def _rank_per_subset(b: BipartiteGraph) -> list[int]:
    m = b.m
    oriented = b.oriented_edges()
    prof = RankProfile(zero_matrix(len(b.side_u), len(b.side_w)))
    ranks = [0] * (1 << m)
    cur = 0
    for t in range(1, 1 << m):
        e = (t & -t).bit_length() - 1
        cur ^= 1 << e
        ranks[cur] = prof.flip_entry(*oriented[e])
    return ranks


def _kappa_per_subset(g: Graph) -> list[int]:
    out = [0] * (1 << g.m)
    for s in range(1 << g.m):
        kappa, _ = components(g, s)
        out[s] = kappa
    return out


class ExactChain:
    """All 2^m states of a single-bond-flip chain with exact stationary
    weights; the transition operator is applied sparsely, never densified
    beyond one row per single-edge move."""

    def __init__(
        self,
        g: Graph | BipartiteGraph,
        params: ChainParams,
        max_edges: int = CHAIN_STATE_LIMIT,
    ):
        graph = g.graph if isinstance(g, BipartiteGraph) else g
        if graph.m > max_edges:
            raise LimitExceededError(
                f"exact chain limited to {max_edges} edges, got {graph.m}"
            )
        if graph.m == 0:
            raise ValueError("chain needs at least one edge")
        self.params = params
        self.graph = graph
        self.m = graph.m
        self.n_states = 1 << graph.m
        if params.family == RWS:
            bip = g if isinstance(g, BipartiteGraph) else bipartition_of(g)
            stat = _rank_per_subset(bip)
            top = min(len(bip.side_u), len(bip.side_w))
        else:
            stat = _kappa_per_subset(graph)
            top = graph.n
        self.statistic = stat
        a, b = params.lam.numerator, params.lam.denominator
        c, d = params.mu.numerator, params.mu.denominator
        m = self.m
        apow = [a**i for i in range(top + 1)]
        bpow = [b**i for i in range(top + 1)]
        cpow = [c**i for i in range(m + 1)]
        dpow = [d**i for i in range(m + 1)]
        self.weights = [
            apow[stat[s]] * bpow[top - stat[s]] * cpow[bin(s).count("1")]
            * dpow[m - bin(s).count("1")]
            for s in range(self.n_states)
        ]
        self.total_weight = sum(self.weights)
        self._sparse = None

    # -- exact quantities -----------------------------------------------------

    def pi_exact(self, state: EdgeSubset | None = None):
        if state is not None:
            return Fraction(self.weights[state], self.total_weight)
        return [Fraction(w, self.total_weight) for w in self.weights]

    def pi_min(self) -> Fraction:
        return Fraction(min(self.weights), self.total_weight)

    def transition_prob(self, h: EdgeSubset, hp: EdgeSubset) -> Fraction:
        """Exact single-step probability, lazy-Metropolis form."""
        if h == hp:
            return 1 - sum(
                (self.transition_prob(h, h ^ (1 << e)) for e in range(self.m)),
                Fraction(0),
            )
        diff = h ^ hp
        if diff & (diff - 1):
            return Fraction(0)
        w, wp = self.weights[h], self.weights[hp]
        return Fraction(min(w, wp), 2 * self.m * w)

    def verify_detailed_balance(self) -> bool:
        """pi(H) P(H,H') == pi(H') P(H',H) for every single-flip pair, exact."""
        for h in range(self.n_states):
            wh = self.weights[h]
            for e in range(self.m):
                hp = h ^ (1 << e)
                if hp < h:
                    continue
                lhs = Fraction(wh, self.total_weight) * self.transition_prob(h, hp)
                rhs = Fraction(self.weights[hp], self.total_weight) * self.transition_prob(hp, h)
                if lhs != rhs:
                    return False
        return True

    # -- float evolution ------------------------------------------------------

    def pi_float(self) -> np.ndarray:
        w = np.array([float(Fraction(x, self.total_weight)) for x in self.weights])
        return w

    def sparse_transition(self) -> csr_matrix:
        if self._sparse is None:
            n, m = self.n_states, self.m
            rows, cols, vals = [], [], []
            stay = np.ones(n)
            for h in range(n):
                wh = self.weights[h]
                for e in range(m):
                    hp = h ^ (1 << e)
                    p = min(wh, self.weights[hp]) / (2 * m * wh)
                    rows.append(h)
                    cols.append(hp)
                    vals.append(p)
                    stay[h] -= p
            rows.extend(range(n))
            cols.extend(range(n))
            vals.extend(stay)
            self._sparse = csr_matrix((vals, (rows, cols)), shape=(n, n))
        return self._sparse

    def tv_curve(
        self,
        start: EdgeSubset,
        eps: float | None = None,
        tmax: int = 1_000_000,
    ) -> list[float]:
        """Total-variation distance to stationarity after 0..t steps from a
        point start, stopping when <= eps (if given) or at tmax."""
        p = self.sparse_transition()
        pi = self.pi_float()
        dist = np.zeros(self.n_states)
        dist[start] = 1.0
        curve = [0.5 * float(np.abs(dist - pi).sum())]
        while len(curve) <= tmax:
            dist = dist @ p
            curve.append(0.5 * float(np.abs(dist - pi).sum()))
            if eps is not None and curve[-1] <= eps:
                break
        return curve

    def default_starts(self) -> list[EdgeSubset]:
        if self.m <= FULL_START_SWEEP_LIMIT:
            return list(range(self.n_states))
        worst = min(range(self.n_states), key=lambda s: self.weights[s])
        return sorted({0, self.n_states - 1, worst})

    def mixing_time(
        self,
        eps: float,
        starts: list[EdgeSubset] | None = None,
        tmax: int = 1_000_000,
    ) -> int:
        """max over starts of min{t : TV(P^t(start,.), pi) <= eps}.

        By default sweeps every state as a start for m <= 12, else the
        canonical trio {empty, full, minimum-weight}.
        """
        if starts is None:
            starts = self.default_starts()
        p = self.sparse_transition()
        pi = self.pi_float()
        dists = np.zeros((len(starts), self.n_states))
        for i, s in enumerate(starts):
            dists[i, s] = 1.0
        t = 0
        tv = 0.5 * np.abs(dists - pi).sum(axis=1)
        pending = tv > eps
        while pending.any():
            if t >= tmax:
                raise RuntimeError(f"no mixing within {tmax} steps")
            dists[pending] = dists[pending] @ p
            t += 1
            tv[pending] = 0.5 * np.abs(dists[pending] - pi).sum(axis=1)
            pending = tv > eps
        return t


def transition_matrix(
    g: Graph | BipartiteGraph, params: ChainParams, max_edges: int = CHAIN_STATE_LIMIT
) -> ExactChain:
    return ExactChain(g, params, max_edges)


def empirical_tv(
    chain: ExactChain, samples: list[EdgeSubset]
) -> float:
    """TV distance between a sample histogram and the exact stationary law."""
    hist = np.zeros(chain.n_states)
    for s in samples:
        hist[s] += 1.0
    hist /= len(samples)
    return 0.5 * float(np.abs(hist - chain.pi_float()).sum())


# ---------------------------------------------------------------------------
# Congestion


@dataclass(frozen=True)
class CongestionResult:
    rho: Fraction
    argmax: tuple[EdgeSubset, EdgeSubset]
    width: int


def congestion(
    g: Graph | BipartiteGraph,
    ordering: EdgeOrdering,
    params: ChainParams,
    max_edges: int = CONGESTION_LIMIT,
) -> CongestionResult:
    """Exact maximum congestion over all transitions for the canonical-path
    family built on ``ordering``.

    For the transition toggling the edge at ordering position t, the loading
    pairs (I, F) factor as I = H xor (any subset of earlier positions) and
    F = H' xor (any subset of later positions), so the sum over all 4^m
    pairs streams by transition with prefix/suffix tables updated in
    O(m 2^m) exact-integer operations total.
    """
    graph = g.graph if isinstance(g, BipartiteGraph) else g
    if graph.m > max_edges:
        raise LimitExceededError(
            f"congestion enumeration limited to {max_edges} edges, got {graph.m}"
        )
    chain = ExactChain(g, params, max_edges)
    wt = chain.weights
    z = chain.total_weight
    m = graph.m
    n = chain.n_states
    perm = ordering.perm

    # suffix sums over subsets of positions > t, snapshot per cut
    s2_snap: dict[int, list[int]] = {m - 1: list(wt)}
    s2k_snap: dict[int, list[int]] = {m - 1: [0] * n}
    for t in range(m - 2, -1, -1):
        bit = 1 << perm[t + 1]
        prev, prevk = s2_snap[t + 1], s2k_snap[t + 1]
        cur = [0] * n
        curk = [0] * n
        for h in range(n):
            o = h ^ bit
            cur[h] = prev[h] + prev[o]
            curk[h] = prevk[h] + prevk[o] + prev[o]
        s2_snap[t] = cur
        s2k_snap[t] = curk

    best_num = Fraction(-1)
    best_pair = (0, 0)
    s1 = list(wt)
    s1k = [0] * n
    for t in range(m):
        bit = 1 << perm[t]
        suf, sufk = s2_snap[t], s2k_snap[t]
        for h in range(n):
            hp = h ^ bit
            num = s1k[h] * suf[hp] + s1[h] * sufk[hp] + s1[h] * suf[hp]
            rho = Fraction(2 * m * num, z * min(wt[h], wt[hp]))
            if rho > best_num:
                best_num = rho
                best_pair = (h, hp)
        if t + 1 < m:
            new = [0] * n
            newk = [0] * n
            for h in range(n):
                o = h ^ bit
                new[h] = s1[h] + s1[o]
                newk[h] = s1k[h] + s1k[o] + s1[o]
            s1, s1k = new, newk

    return CongestionResult(best_num, best_pair, ordering.width)


def congestion_bound(g: Graph, params: ChainParams, width: int) -> Fraction:
    """2 |E|^2 * max(lam, 1/lam)^width, the canonical-path guarantee."""
    bar = max(params.lam, 1 / params.lam)
    return 2 * Fraction(g.m) ** 2 * bar**width


def mixing_bound_from_congestion(
    rho: Fraction, pi_start: Fraction, eps: float
) -> float:
    """rho * (log(1/pi(start)) + log(1/eps)) — the congestion-to-mixing bound."""
    import math

    return float(rho) * (math.log(1 / float(pi_start)) + math.log(1 / eps))
