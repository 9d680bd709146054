"""Exact brute-force evaluation of the subgraph partition functions.

Everything here is exact rational arithmetic (``fractions.Fraction``); there
are no floating-point paths.  Subset enumeration walks a Gray code so that
consecutive subsets differ in one edge and the maintained elimination state
absorbs each step as a single-entry flip.  The per-(rank, size) counts table
is the streaming accumulator, so memory is independent of 2^m; the table is
attached to results for small m so new parameter points can be evaluated
without re-enumeration.  0^0 = 1 throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .gf2 import RankProfile, zero_matrix
from .graphs import (
    BipartiteGraph,
    Graph,
    LimitExceededError,
    components,
    component_of,
)

DEFAULT_ENUM_LIMIT = 26
TERMS_RETENTION_LIMIT = 20
ORACLE_VERTEX_LIMIT = 30
PBIS_ORACLE_VERTEX_LIMIT = 24
PBIS_CLASS_BUDGET = 2_000_000

Rational = Fraction


@dataclass(frozen=True)
class EvalResult:
    """Exact value plus, when retained, the per-(statistic, size) counts."""

    value: Fraction
    terms: dict[tuple[int, int], int] | None = None


def _check_limit(m: int, max_edges: int | None) -> None:
    limit = DEFAULT_ENUM_LIMIT if max_edges is None else max_edges
    if m > limit:
        raise LimitExceededError(f"{m} edges exceeds enumeration limit {limit}")


def _powers(x: Fraction, top: int) -> list[Fraction]:
    out = [Fraction(1)]
    for _ in range(top):
        out.append(out[-1] * x)
    return out


def evaluate_table(
    counts: list[list[int]], lam: Fraction, mu: Fraction
) -> Fraction:
    """sum counts[r][s] * lam^r * mu^s with 0^0 = 1."""
    lam_p = _powers(Fraction(lam), len(counts) - 1)
    mu_p = _powers(Fraction(mu), len(counts[0]) - 1 if counts else 0)
    total = Fraction(0)
    for r, row in enumerate(counts):
        for s, c in enumerate(row):
            if c:
                total += c * lam_p[r] * mu_p[s]
    return total


def _table_to_terms(counts: list[list[int]]) -> dict[tuple[int, int], int]:
    return {
        (r, s): c for r, row in enumerate(counts) for s, c in enumerate(row) if c
    }


# ---------------------------------------------------------------------------
# Gray-code rank tables


def bipartite_rank_size_counts(
    b: BipartiteGraph, max_edges: int | None = None, workers: int = 1
) -> list[list[int]]:
    """counts[r][s] = number of edge subsets of size s whose bipartite
    adjacency matrix has rank r."""
    _check_limit(b.m, max_edges)
    if workers > 1:
        return _parallel_table(b, workers, bipartite=True)
    return _bipartite_table_chunk(b, 0, 1 << b.m)


def _bipartite_table_chunk(b: BipartiteGraph, start: int, stop: int) -> list[list[int]]:
    m = b.m
    nu, nw = len(b.side_u), len(b.side_w)
    oriented = b.oriented_edges()
    counts = [[0] * (m + 1) for _ in range(min(nu, nw) + 1)]
    cur = start ^ (start >> 1)
    prof = RankProfile(zero_matrix(nu, nw))
    size = 0
    v = cur
    while v:
        e = (v & -v).bit_length() - 1
        prof.flip_entry(*oriented[e])
        size += 1
        v &= v - 1
    counts[prof.rank][size] += 1
    flip = prof.flip_entry
    for t in range(start + 1, stop):
        e = (t & -t).bit_length() - 1
        bit = 1 << e
        cur ^= bit
        size += 1 if cur & bit else -1
        r = flip(*oriented[e])
        counts[r][size] += 1
    return counts


def graph_rank_size_counts(
    g: Graph, max_edges: int | None = None, workers: int = 1
) -> list[list[int]]:
    """counts[r][s] over subsets, with r the rank of the full (symmetric,
    zero-diagonal) adjacency matrix of (V, S)."""
    _check_limit(g.m, max_edges)
    if workers > 1:
        return _parallel_table(g, workers, bipartite=False)
    return _graph_table_chunk(g, 0, 1 << g.m)


def _graph_table_chunk(g: Graph, start: int, stop: int) -> list[list[int]]:
    m, n = g.m, g.n
    counts = [[0] * (m + 1) for _ in range(n + 1)]
    cur = start ^ (start >> 1)
    prof = RankProfile(zero_matrix(n, n))
    size = 0
    v = cur
    while v:
        e = (v & -v).bit_length() - 1
        u, w = g.edges[e]
        prof.flip_entry(u, w)
        prof.flip_entry(w, u)
        size += 1
        v &= v - 1
    counts[prof.rank][size] += 1
    flip = prof.flip_entry
    edges = g.edges
    for t in range(start + 1, stop):
        e = (t & -t).bit_length() - 1
        bit = 1 << e
        cur ^= bit
        size += 1 if cur & bit else -1
        u, w = edges[e]
        flip(u, w)
        r = flip(w, u)
        counts[r][size] += 1
    return counts


def _table_worker(args):
    obj, start, stop, bipartite = args
    if bipartite:
        return _bipartite_table_chunk(obj, start, stop)
    return _graph_table_chunk(obj, start, stop)


def _parallel_table(obj, workers: int, bipartite: bool) -> list[list[int]]:
    import multiprocessing as mp

    m = obj.m
    total = 1 << m
    workers = max(1, min(workers, total))
    bounds = [total * i // workers for i in range(workers + 1)]
    jobs = [
        (obj, bounds[i], bounds[i + 1], bipartite)
        for i in range(workers)
        if bounds[i] < bounds[i + 1]
    ]
    with mp.Pool(len(jobs)) as pool:
        parts = pool.map(_table_worker, jobs)
    out = parts[0]
    for part in parts[1:]:
        for r in range(len(out)):
            for s in range(len(out[0])):
                out[r][s] += part[r][s]
    return out


# ---------------------------------------------------------------------------
# The rank-weighted sums


def r2_prime(
    b: BipartiteGraph,
    lam: Fraction,
    mu: Fraction,
    max_edges: int | None = None,
    workers: int = 1,
) -> EvalResult:
    """sum over S of lam^(bipartite rank of S) * mu^|S|."""
    counts = bipartite_rank_size_counts(b, max_edges, workers)
    value = evaluate_table(counts, Fraction(lam), Fraction(mu))
    terms = _table_to_terms(counts) if b.m <= TERMS_RETENTION_LIMIT else None
    return EvalResult(value, terms)


def r2(
    g: Graph,
    lam: Fraction,
    mu: Fraction,
    max_edges: int | None = None,
    workers: int = 1,
) -> EvalResult:
    """sum over S of lam^(adjacency rank of S) * mu^|S| for a general graph."""
    counts = graph_rank_size_counts(g, max_edges, workers)
    value = evaluate_table(counts, Fraction(lam), Fraction(mu))
    terms = _table_to_terms(counts) if g.m <= TERMS_RETENTION_LIMIT else None
    return EvalResult(value, terms)


# ---------------------------------------------------------------------------
# Component-weighted sums (random cluster / Tutte)


def component_size_counts(g: Graph, max_edges: int | None = None) -> list[list[int]]:
    """counts[kappa][s] = number of subsets of size s with kappa components."""
    _check_limit(g.m, max_edges)
    m, n = g.m, g.n
    counts = [[0] * (m + 1) for _ in range(n + 1)]
    edges = g.edges
    parent = list(range(n))
    for s in range(1 << m):
        for i in range(n):
            parent[i] = i

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        size = 0
        kappa = n
        rem = s
        while rem:
            e = (rem & -rem).bit_length() - 1
            rem &= rem - 1
            size += 1
            ru, rv = find(edges[e][0]), find(edges[e][1])
            if ru != rv:
                parent[ru] = rv
                kappa -= 1
        counts[kappa][size] += 1
    return counts


def random_cluster(
    g: Graph, q: Fraction, mu: Fraction, max_edges: int | None = None
) -> EvalResult:
    """sum over S of q^(number of components of (V,S)) * mu^|S|.

    Isolated vertices count as components.
    """
    counts = component_size_counts(g, max_edges)
    value = evaluate_table(counts, Fraction(q), Fraction(mu))
    terms = _table_to_terms(counts) if g.m <= TERMS_RETENTION_LIMIT else None
    return EvalResult(value, terms)


def tutte(g: Graph, x: Fraction, y: Fraction, max_edges: int | None = None) -> Fraction:
    """Tutte polynomial at (x, y): sum over subsets of
    (x-1)^(kappa(S)-kappa(E)) * (y-1)^(|S|-|V|+kappa(S))."""
    x, y = Fraction(x), Fraction(y)
    counts = component_size_counts(g, max_edges)
    kappa_full, _ = components(g, g.full_subset())
    total = Fraction(0)
    xm = _powers(x - 1, g.n)
    ym = _powers(y - 1, g.m + g.n)
    for kappa, row in enumerate(counts):
        for s, c in enumerate(row):
            if c:
                total += c * xm[kappa - kappa_full] * ym[s - g.n + kappa]
    return total


# ---------------------------------------------------------------------------
# Counting specialisations


def count_bis(b: BipartiteGraph, max_edges: int | None = None, workers: int = 1) -> int:
    """Number of independent sets of a bipartite graph, via the rank sum:
    2^(|U|+|W|-|E|) * (rank sum at lam=1/2, mu=1)."""
    val = r2_prime(b, Fraction(1, 2), Fraction(1), max_edges, workers).value
    val *= Fraction(2) ** (b.n - b.m)
    if val.denominator != 1:
        raise ArithmeticError(f"independent-set count came out non-integer: {val}")
    return val.numerator


def count_independent_sets(g: Graph) -> int:
    """Independent sets of any graph by branching enumeration (the oracle)."""
    if g.n > ORACLE_VERTEX_LIMIT:
        raise LimitExceededError(
            f"oracle limited to {ORACLE_VERTEX_LIMIT} vertices, got {g.n}"
        )
    closed = [1 << v for v in range(g.n)]
    for u, v in g.edges:
        closed[u] |= 1 << v
        closed[v] |= 1 << u
    memo: dict[int, int] = {0: 1}

    def count(mask: int) -> int:
        if mask in memo:
            return memo[mask]
        v = (mask & -mask).bit_length() - 1
        res = count(mask & ~(1 << v)) + count(mask & ~closed[v])
        memo[mask] = res
        return res

    return count((1 << g.n) - 1)


def count_bis_oracle(g: Graph | BipartiteGraph) -> int:
    if isinstance(g, BipartiteGraph):
        g = g.graph
    return count_independent_sets(g)


def count_pbis(
    b: BipartiteGraph, eta: Fraction, max_edges: int | None = None
) -> Fraction:
    """Labelings weighted by (1+eta)^(edges with both ends 1) * (1-eta)^(rest),
    evaluated through the rank sum: 2^|V| * (rank sum at lam=1/2, mu=-eta)."""
    eta = Fraction(eta)
    val = r2_prime(b, Fraction(1, 2), -eta, max_edges).value
    return val * Fraction(2) ** b.n


def pbis_weight_counts(g: Graph | BipartiteGraph) -> list[int]:
    """counts[w] = number of 0/1 vertex labelings with w fully-1 edges."""
    if isinstance(g, BipartiteGraph):
        g = g.graph
    if g.n > PBIS_ORACLE_VERTEX_LIMIT:
        raise LimitExceededError(
            f"labeling oracle limited to {PBIS_ORACLE_VERTEX_LIMIT} vertices, got {g.n}"
        )
    nbrs: list[list[int]] = [[] for _ in range(g.n)]
    for u, v in g.edges:
        nbrs[u].append(v)
        nbrs[v].append(u)
    counts = [0] * (g.m + 1)
    ones_nbrs = [0] * g.n  # currently-1 neighbours of each vertex
    cur = 0
    w = 0
    counts[0] += 1
    for t in range(1, 1 << g.n):
        v = (t & -t).bit_length() - 1
        bit = 1 << v
        cur ^= bit
        if cur & bit:
            w += ones_nbrs[v]
            for u in nbrs[v]:
                ones_nbrs[u] += 1
        else:
            for u in nbrs[v]:
                ones_nbrs[u] -= 1
            w -= ones_nbrs[v]
        counts[w] += 1
    return counts


def count_pbis_oracle(g: Graph | BipartiteGraph, eta: Fraction) -> Fraction:
    """Direct sum over all 2^n labelings."""
    eta = Fraction(eta)
    counts = pbis_weight_counts(g)
    m = len(counts) - 1
    up = _powers(1 + eta, m)
    down = _powers(1 - eta, m)
    return sum((c * up[w] * down[m - w] for w, c in enumerate(counts) if c), Fraction(0))


def _twin_classes(g: Graph) -> tuple[list[int], list[list[int]]]:
    """Group vertices by open neighborhood.  Returns (class sizes, quotient
    adjacency lists); two classes are adjacent iff their members are fully
    joined (automatic for equal-neighborhood classes)."""
    nbr = [0] * g.n
    for u, v in g.edges:
        nbr[u] |= 1 << v
        nbr[v] |= 1 << u
    buckets: dict[int, list[int]] = {}
    for v in range(g.n):
        buckets.setdefault(nbr[v], []).append(v)
    reps = list(buckets)
    index = {key: i for i, key in enumerate(reps)}
    sizes = [len(buckets[key]) for key in reps]
    member = {}
    for key, verts in buckets.items():
        for v in verts:
            member[v] = index[key]
    adj: list[set[int]] = [set() for _ in reps]
    for u, v in g.edges:
        adj[member[u]].add(member[v])
        adj[member[v]].add(member[u])
    return sizes, [sorted(a) for a in adj]


def count_pbis_twins(
    g: Graph | BipartiteGraph, eta: Fraction, class_budget: int = PBIS_CLASS_BUDGET
) -> Fraction:
    """Labeling sum regrouped over classes of vertices with equal
    neighborhoods; exact for any graph, fast when there are few classes."""
    if isinstance(g, BipartiteGraph):
        g = g.graph
    eta = Fraction(eta)
    sizes, adj = _twin_classes(g)
    work = 1
    for s in sizes:
        work *= s + 1
        if work > class_budget:
            raise LimitExceededError("too many twin-class label vectors")
    pairs = [(i, j) for i in range(len(sizes)) for j in adj[i] if j > i]
    m = g.m
    by_w: dict[int, int] = {}

    def rec(i: int, hs: list[int], mult: int) -> None:
        if i == len(sizes):
            w = sum(hs[a] * hs[b] for a, b in pairs)
            by_w[w] = by_w.get(w, 0) + mult
            return
        for h in range(sizes[i] + 1):
            hs.append(h)
            rec(i + 1, hs, mult * comb(sizes[i], h))
            hs.pop()

    rec(0, [], 1)
    up = _powers(1 + eta, m)
    down = _powers(1 - eta, m)
    return sum((c * up[w] * down[m - w] for w, c in by_w.items()), Fraction(0))


def count_pbis_auto(
    b: BipartiteGraph,
    eta: Fraction,
    max_edges: int | None = None,
) -> Fraction:
    """Exact permissive count by whichever exact route fits the instance:
    the rank-sum identity, the twin-class regrouping, or the labeling sum."""
    limit = DEFAULT_ENUM_LIMIT if max_edges is None else max_edges
    if b.m <= limit:
        return count_pbis(b, eta, max_edges)
    try:
        return count_pbis_twins(b, eta)
    except LimitExceededError:
        pass
    if b.n <= PBIS_ORACLE_VERTEX_LIMIT:
        return count_pbis_oracle(b, eta)
    raise LimitExceededError(
        f"graph too large for any exact route (n={b.n}, m={b.m})"
    )


def count_matchings(g: Graph, max_edges: int | None = None) -> int:
    """Subsets whose adjacency rank equals twice their size are exactly the
    matchings; count them from the rank table."""
    counts = graph_rank_size_counts(g, max_edges)
    return sum(
        counts[2 * s][s] for s in range(len(counts[0])) if 2 * s < len(counts)
    )


def count_perfect_matchings(g: Graph, max_edges: int | None = None) -> int:
    """Full-rank subsets of minimum size n/2 are exactly the perfect
    matchings (none exist for odd n)."""
    if g.n % 2:
        return 0
    counts = graph_rank_size_counts(g, max_edges)
    half = g.n // 2
    if half >= len(counts[0]):
        return 0
    return counts[g.n][half]


# ---------------------------------------------------------------------------
# Purity-based evaluation (W-degrees <= 2 only)


def _require_w_degrees_at_most_2(b: BipartiteGraph) -> None:
    deg = b.graph.degrees()
    for v in b.side_w:
        if deg[v] > 2:
            raise ValueError(f"W-side vertex {v} has degree {deg[v]} > 2")


def purity_split_sums(
    ups: BipartiteGraph,
    root: int,
    lam: Fraction,
    mu: Fraction,
    max_edges: int | None = None,
) -> tuple[Fraction, Fraction]:
    """(Z_pure, Z_mixed): sums of lam^(-pure component count) * mu^|S| over
    subsets, split by whether the root's component is pure.

    Requires all W degrees <= 2 and lam != 0.
    """
    lam, mu = Fraction(lam), Fraction(mu)
    if lam == 0:
        raise ValueError("lam must be nonzero (negative powers of lam appear)")
    _require_w_degrees_at_most_2(ups)
    _check_limit(ups.m, max_edges)
    z_pure = Fraction(0)
    z_mixed = Fraction(0)
    inv = 1 / lam
    inv_p = _powers(inv, ups.n)
    mu_p = _powers(mu, ups.m)
    for s in range(1 << ups.m):
        root_pure, kpure = component_of(ups, s, root)
        term = inv_p[kpure] * mu_p[bin(s).count("1")]
        if root_pure:
            z_pure += term
        else:
            z_mixed += term
    return z_pure, z_mixed


def r2_prime_via_purity(
    b: BipartiteGraph,
    lam: Fraction,
    mu: Fraction,
    max_edges: int | None = None,
) -> EvalResult:
    """Rank sum computed as lam^(|U| - pure component count) instead of via
    the matrix; must agree exactly with :func:`r2_prime`."""
    lam, mu = Fraction(lam), Fraction(mu)
    _require_w_degrees_at_most_2(b)
    _check_limit(b.m, max_edges)
    nu = len(b.side_u)
    counts = [[0] * (b.m + 1) for _ in range(nu + 1)]
    g = b.graph
    w_side = b.side_w
    for s in range(1 << b.m):
        _, _, pure = components(g, s, w_side)
        kpure = sum(pure)
        counts[nu - kpure][bin(s).count("1")] += 1
    value = evaluate_table(counts, lam, mu)
    terms = _table_to_terms(counts) if b.m <= TERMS_RETENTION_LIMIT else None
    return EvalResult(value, terms)


# ---------------------------------------------------------------------------
# Gadget closed forms


def fan_gadget_closed_forms(
    k: int, lam: Fraction, mu: Fraction
) -> tuple[Fraction, Fraction]:
    """(X, Y) for the fan gadget: X = lam * Z_pure and Y = X + Z_mixed.

    X = (mu+1)^(k+1) + mu^2 + 1/lam - 1
    Y = (mu+1) * ((mu+1)^(k+1) + 1/lam - 1)
    """
    lam, mu = Fraction(lam), Fraction(mu)
    x = (mu + 1) ** (k + 1) + mu * mu + 1 / lam - 1
    y = (mu + 1) * ((mu + 1) ** (k + 1) + 1 / lam - 1)
    return x, y


def biclique_gadget_closed_forms(k: int, lam: Fraction) -> tuple[Fraction, Fraction]:
    """(X, Y) for the biclique gadget at mu = -2.

    X = 1/lam^2 + 25^k/lam - 3 + 3*25^k + 1/lam
    Y = -1/lam^2 - 25^k/lam - 1 + 25^k + 3/lam
    """
    lam = Fraction(lam)
    inv = 1 / lam
    five = Fraction(5) ** (2 * k)
    x = inv * inv + five * inv - 3 + 3 * five + inv
    y = -inv * inv - five * inv - 1 + five + 3 * inv
    return x, y
