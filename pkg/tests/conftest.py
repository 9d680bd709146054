"""Shared corpus builders and independent oracles for the test suite.

Oracles here deliberately avoid the library's fast paths: matchings are
enumerated subset-by-subset, independence is checked edge-by-edge, ranks
come from a fresh elimination.  Values asserted elsewhere were computed with
these.
"""

from __future__ import annotations

import random
from itertools import combinations

import pytest

from rankpoly.graphs import BipartiteGraph, Graph


def random_graph(rng: random.Random, n: int, density: float = 0.5) -> Graph:
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    edges = tuple(e for e in pairs if rng.random() < density)
    return Graph(n, edges)


def random_graph_m(rng: random.Random, n: int, m: int) -> Graph:
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    rng.shuffle(pairs)
    return Graph(n, tuple(pairs[: min(m, len(pairs))]))


def random_bipartite(
    rng: random.Random, a: int, b: int, density: float = 0.5
) -> BipartiteGraph:
    pairs = [(i, a + j) for i in range(a) for j in range(b)]
    edges = tuple(e for e in pairs if rng.random() < density)
    g = Graph(a + b, edges)
    return BipartiteGraph(g, tuple(range(a)), tuple(range(a, a + b)))


def random_bipartite_m(rng: random.Random, a: int, b: int, m: int) -> BipartiteGraph:
    pairs = [(i, a + j) for i in range(a) for j in range(b)]
    rng.shuffle(pairs)
    g = Graph(a + b, tuple(pairs[: min(m, len(pairs))]))
    return BipartiteGraph(g, tuple(range(a)), tuple(range(a, a + b)))


def random_tree(rng: random.Random, n: int) -> Graph:
    """Uniform-ish random tree: each vertex i>0 attaches to a random earlier one."""
    return Graph(n, tuple((rng.randrange(i), i) for i in range(1, n)))


def random_forest(rng: random.Random, n: int, keep: float = 0.7) -> Graph:
    t = random_tree(rng, n)
    return Graph(n, tuple(e for e in t.edges if rng.random() < keep))


def random_connected_w2(rng: random.Random, nu: int, nw: int) -> BipartiteGraph:
    """Random connected bipartite graph whose W side has degrees <= 2.

    Needs nw >= nu - 1: degree-<=2 W vertices are the only bridges between
    U vertices.
    """
    if nw < nu - 1:
        raise ValueError("need nw >= nu - 1 for connectivity")
    for _ in range(2000):
        edges = set()
        for w in range(nw):
            deg = rng.choice((1, 2))
            for u in rng.sample(range(nu), min(deg, nu)):
                edges.add((u, nu + w))
        g = Graph(nu + nw, tuple(sorted(edges)))
        from rankpoly.graphs import is_connected

        if is_connected(g):
            return BipartiteGraph(g, tuple(range(nu)), tuple(range(nu, nu + nw)))
    raise RuntimeError("could not draw a connected instance")


# ---------------------------------------------------------------------------
# Independent oracles


def is_matching(g: Graph, subset: int) -> bool:
    used = set()
    for i, (u, v) in enumerate(g.edges):
        if (subset >> i) & 1:
            if u in used or v in used:
                return False
            used.add(u)
            used.add(v)
    return True


def matchings_by_enumeration(g: Graph) -> list[int]:
    return [s for s in range(1 << g.m) if is_matching(g, s)]


def max_matching_by_enumeration(g: Graph, subset: int | None = None) -> int:
    s = g.full_subset() if subset is None else subset
    ids = [i for i in range(g.m) if (s >> i) & 1]
    best = 0
    for size in range(len(ids), 0, -1):
        if size <= best:
            break
        for combo in combinations(ids, size):
            mask = 0
            for i in combo:
                mask |= 1 << i
            if is_matching(g, mask):
                best = max(best, size)
                break
    return best


def independent_sets_by_enumeration(g: Graph) -> int:
    count = 0
    for mask in range(1 << g.n):
        if all(
            not ((mask >> u) & 1 and (mask >> v) & 1) for u, v in g.edges
        ):
            count += 1
    return count


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0xC0FFEE)
