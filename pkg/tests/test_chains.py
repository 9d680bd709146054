"""Single-bond-flip chains: step law, caching, determinism, the BIS bridge."""

from __future__ import annotations

from fractions import Fraction as F

import pytest

from rankpoly.chains import (
    RC,
    RWS,
    ChainParams,
    ChainState,
    bis_sample_bridge,
    run,
    step_rc,
    step_rws,
)
from rankpoly.gf2 import bipartite_adjacency, left_nullspace, rank
from rankpoly.graphs import (
    bipartition_of,
    complete_graph,
    cycle_graph,
    path_graph,
    star_graph,
    subset_from_edges,
)
from rankpoly.mixing import ExactChain, empirical_tv
from rankpoly.rng import SplitMix64
from conftest import random_tree


class TestParams:
    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError, match="positive"):
            ChainParams(RWS, F(0), F(1))
        with pytest.raises(ValueError, match="positive"):
            ChainParams(RC, F(1), F(-1))

    def test_rejects_unknown_family(self):
        with pytest.raises(ValueError, match="family"):
            ChainParams("glauber", F(1), F(1))

    def test_rws_needs_bipartite(self):
        with pytest.raises(ValueError, match="bipartite"):
            ChainState(complete_graph(3), ChainParams(RWS, F(1), F(1)))


class TestStepLaw:
    def test_k2_both_families_are_uniform_coin(self):
        # acceptance ratio 1 and laziness 1/2: P = [[1/2,1/2],[1/2,1/2]]
        g = path_graph(2)
        for fam, target in ((RWS, bipartition_of(g)), (RC, g)):
            chain = ExactChain(target, ChainParams(fam, F(1), F(1)))
            for h in (0, 1):
                for hp in (0, 1):
                    assert chain.transition_prob(h, hp) == F(1, 2)

    def test_tiny_lam_rejects_rank_increase(self):
        b = bipartition_of(star_graph(4))
        chain = ExactChain(b, ChainParams(RWS, F(1, 10**6), F(1)))
        # from the empty set, adding any edge raises the rank
        assert chain.transition_prob(0, 1) == F(1, 2 * 4) * F(1, 10**6)

    def test_star6_acceptance_frequencies_within_3_sigma(self):
        g = star_graph(6)
        b = bipartition_of(g)
        params = ChainParams(RWS, F(1, 2), F(1))
        chain = ExactChain(b, params)
        start = subset_from_edges(g, [(0, 1), (0, 2)])
        trials = 100_000
        gen = SplitMix64(7)  # deterministic; a real bias shows up at z >> 3
        hits: dict[int, int] = {}
        for _ in range(trials):
            state = ChainState(b, params, start)
            state.step(gen)
            hits[state.subset] = hits.get(state.subset, 0) + 1
        for target in {start} | {start ^ (1 << e) for e in range(g.m)}:
            p = float(chain.transition_prob(start, target))
            got = hits.get(target, 0) / trials
            sigma = (p * (1 - p) / trials) ** 0.5
            assert abs(got - p) <= 3 * sigma + 1e-9, (target, got, p)

    def test_rc_delta_kappa_cases(self):
        g = complete_graph(3)
        params = ChainParams(RC, F(2), F(1))
        two_edges = subset_from_edges(g, [(0, 1), (0, 2)])
        state = ChainState(g, params, two_edges)
        # adding the closing edge keeps the component count
        closing = next(i for i, e in enumerate(g.edges) if e == (1, 2))
        assert state.rc_delta_kappa(closing) == 0
        # removing a bridge splits
        bridge = next(i for i, e in enumerate(g.edges) if e == (0, 1))
        assert state.rc_delta_kappa(bridge) == 1
        # removing a cycle edge does not
        full = ChainState(g, params, g.full_subset())
        assert full.rc_delta_kappa(bridge) == 0
        # adding an edge between separated components merges
        empty = ChainState(g, params, 0)
        assert empty.rc_delta_kappa(bridge) == -1


class TestCachedStatistics:
    def test_debug_run_rws(self):
        b = bipartition_of(cycle_graph(6))
        run(b, ChainParams(RWS, F(1, 2), F(2)), 10_000, seed=5, debug_check=True)

    def test_debug_run_rc(self):
        run(cycle_graph(5), ChainParams(RC, F(3), F(1, 2)), 10_000, seed=6, debug_check=True)

    def test_tree_rank_equals_matching_along_run(self, rng):
        from rankpoly.graphs import max_matching

        t = random_tree(rng, 7)
        b = bipartition_of(t)
        params = ChainParams(RWS, F(1, 2), F(1))
        state = ChainState(b, params, 0)
        gen = SplitMix64(11)
        for _ in range(2000):
            state.step(gen)
            assert state.statistic == max_matching(t, state.subset)


class TestRun:
    def test_zero_steps_keeps_initial(self):
        b = bipartition_of(path_graph(3))
        res = run(b, ChainParams(RWS, F(1), F(1)), 0, seed=1, initial=0b10)
        assert res.final.subset == 0b10

    def test_same_seed_reproduces(self):
        g = cycle_graph(5)
        p = ChainParams(RC, F(2), F(1))
        a = run(g, p, 400, seed=9, thin=7)
        b = run(g, p, 400, seed=9, thin=7)
        assert a.samples == b.samples and a.final.subset == b.final.subset

    def test_different_seeds_diverge(self):
        g = cycle_graph(5)
        p = ChainParams(RC, F(2), F(1))
        a = run(g, p, 400, seed=9, thin=7)
        b = run(g, p, 400, seed=10, thin=7)
        assert a.samples != b.samples

    def test_negative_steps_rejected(self):
        with pytest.raises(ValueError):
            run(path_graph(2), ChainParams(RC, F(1), F(1)), -1, seed=0)

    def test_step_helpers_enforce_family(self):
        b = bipartition_of(path_graph(2))
        state = ChainState(b, ChainParams(RWS, F(1), F(1)))
        gen = SplitMix64(0)
        step_rws(state, gen)
        with pytest.raises(ValueError):
            step_rc(state, gen)


class TestRcEmpiricalDistribution:
    def test_triangle_q2_long_run_tv(self):
        g = complete_graph(3)
        params = ChainParams(RC, F(2), F(1))
        chain = ExactChain(g, params)
        res = run(g, params, 200_000, seed=31, burnin=2_000, thin=10)
        assert empirical_tv(chain, res.samples) < 0.02


class TestBisBridge:
    def test_empty_sample_gives_uniform_u(self):
        b = bipartition_of(path_graph(3))  # |U| = 2
        gen = SplitMix64(3)
        seen = {}
        for _ in range(8000):
            u, _ = bis_sample_bridge(b, 0, gen)
            seen[u] = seen.get(u, 0) + 1
        assert set(seen) == {0, 1, 2, 3}
        for v, c in seen.items():
            assert abs(c / 8000 - 0.25) < 0.03

    def test_k2_marginal_exactly_matches_share_counts(self):
        # P(u) = 2^k / #BIS via exhaustive mixture of nullspace laws
        b = bipartition_of(path_graph(2))
        weights = {}
        for s in range(2):
            w = F(1, 2) ** rank(bipartite_adjacency(b, s))
            for u in left_nullspace_elements(bipartite_adjacency(b, s)):
                weights[u] = weights.get(u, F(0)) + w / (
                    2 ** len(left_nullspace(bipartite_adjacency(b, s)))
                )
        total = sum(weights.values())
        marginal = {u: w / total for u, w in weights.items()}
        assert marginal == {0: F(2, 3), 1: F(1, 3)}

    def test_p3_bridge_marginal_tv(self):
        b = bipartition_of(path_graph(3))
        params = ChainParams(RWS, F(1, 2), F(1))
        chain = ExactChain(b, params)
        pi = chain.pi_exact()
        # exact mixture marginal over u
        exact_marginal: dict[int, F] = {}
        for s in range(chain.n_states):
            mat = bipartite_adjacency(b, s)
            elems = left_nullspace_elements(mat)
            for u in elems:
                exact_marginal[u] = exact_marginal.get(u, F(0)) + pi[s] / len(elems)
        # 2^k / #BIS form, k = unblocked W-columns of the whole graph
        full = bipartite_adjacency(b)
        for u, prob in exact_marginal.items():
            blocked = 0
            for ui in range(full.rows):
                if (u >> ui) & 1:
                    blocked |= full.data[ui]
            k = len(b.side_w) - bin(blocked).count("1")
            assert prob == F(2**k, 5)
        # sampled distribution against the exact marginal
        gen = SplitMix64(17)
        weights = [float(p) for p in pi]
        import random as _random

        py = _random.Random(99)
        counts: dict[int, int] = {}
        trials = 100_000
        for _ in range(trials):
            s = py.choices(range(chain.n_states), weights=weights)[0]
            u, w_vec = bis_sample_bridge(b, s, gen)
            counts[u] = counts.get(u, 0) + 1
        tv = 0.5 * sum(
            abs(counts.get(u, 0) / trials - float(exact_marginal.get(u, F(0))))
            for u in range(4)
        )
        assert tv < 0.02

    def test_bridge_output_is_independent_set(self, rng):
        from conftest import random_bipartite

        gen = SplitMix64(23)
        for _ in range(20):
            b = random_bipartite(rng, 3, 3, 0.6)
            s = rng.randrange(1 << b.m) if b.m else 0
            u, w = bis_sample_bridge(b, s, gen)
            for ui, wi in b.oriented_edges():
                assert not ((u >> ui) & 1 and (w >> wi) & 1)


def left_nullspace_elements(mat) -> list[int]:
    """All vectors of the left null space, from a basis."""
    basis = left_nullspace(mat)
    out = [0]
    for b in basis:
        out += [x ^ b for x in out]
    return out
