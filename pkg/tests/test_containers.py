"""Collision graphs, bipartite structure, density/container checks, bounds."""

import math
from itertools import combinations

import numpy as np
import pytest

from sidonlab.containers import (
    HypothesisError,
    SimpleGraph,
    bound_large,
    bound_small,
    bound_small_t_regime,
    build_bipartite_B,
    build_collision_graph,
    c_omega,
    check_four_cycle_free,
    count_independent_sets,
    density_beta,
    density_threshold,
    edge_count_identity,
    s0_large,
    schedule,
    verify_container_lemma,
    verify_density_lemma,
)
from sidonlab.grid import GridParams, unrank


# ---------------------------------------------------------------------------
# SimpleGraph and independent sets


def test_simple_graph_dedup_and_loops():
    g = SimpleGraph(4, [(0, 1), (1, 0), (2, 3)])
    assert g.num_edges == 2
    with pytest.raises(ValueError):
        SimpleGraph(3, [(1, 1)])


def test_induced_edge_count_naive():
    rng = np.random.default_rng(3)
    edges = [(u, v) for u in range(8) for v in range(u + 1, 8) if rng.random() < 0.4]
    g = SimpleGraph(8, edges)
    eset = set(edges)
    for mask in range(1 << 8):
        verts = [v for v in range(8) if mask >> v & 1]
        naive = sum(1 for u, v in combinations(verts, 2) if (u, v) in eset)
        assert g.induced_edge_count(mask) == naive


def test_count_independent_sets_naive():
    rng = np.random.default_rng(5)
    edges = [(u, v) for u in range(9) for v in range(u + 1, 9) if rng.random() < 0.3]
    g = SimpleGraph(9, edges)
    eset = set(edges)
    for k in range(10):
        naive = sum(
            1
            for combo in combinations(range(9), k)
            if not any((u, v) in eset for u, v in combinations(combo, 2))
        )
        assert count_independent_sets(g, k) == naive
    with pytest.raises(ValueError):
        count_independent_sets(SimpleGraph(31, []), 1)


# ---------------------------------------------------------------------------
# Collision graph


def _naive_collision_edges(seed_pts, g):
    """Reference: u ~ v iff u + b1 = v + b2 for some b1, b2 in the seed,
    i.e. u - v lies in the seed's difference set."""
    diffs = {
        tuple(a - b for a, b in zip(b1, b2))
        for b1 in seed_pts
        for b2 in seed_pts
        if b1 != b2
    }
    seed_ranks = {sum(c * g.n**i for i, c in enumerate(p)) for p in seed_pts}
    verts = [unrank(r, g) for r in range(g.size) if r not in seed_ranks]
    edges = set()
    for i, u in enumerate(verts):
        for v in verts[i + 1 :]:
            if tuple(a - b for a, b in zip(u, v)) in diffs:
                ur = sum(c * g.n**k for k, c in enumerate(u))
                vr = sum(c * g.n**k for k, c in enumerate(v))
                edges.add((min(ur, vr), max(ur, vr)))
    return edges


def test_collision_graph_matches_naive():
    cases = [
        (GridParams(9, 1), [(0,), (1,), (3,)]),
        (GridParams(12, 1), [(0,), (1,), (4,), (9,)]),
        (GridParams(4, 2), [(0, 0), (1, 0), (3, 1)]),
        (GridParams(3, 3), [(0, 0, 0), (1, 1, 0), (0, 2, 1)]),
    ]
    for g, S in cases:
        graph = build_collision_graph(S, g)
        assert set(graph.edges) == _naive_collision_edges(S, g)
        assert len(graph.vertices) == g.size - len(S)


def test_collision_graph_rejects_non_sidon_seed():
    g = GridParams(9, 1)
    with pytest.raises(HypothesisError):
        build_collision_graph([(0,), (1,), (2,)], g)


def test_collision_graph_formats():
    g = GridParams(6, 1)
    graph = build_collision_graph([(0,), (1,)], g)
    dimacs = graph.to_dimacs()
    assert dimacs.startswith(f"p edge {len(graph.vertices)} {len(graph.edges)}\n")
    assert dimacs.count("\ne ") == len(graph.edges)
    edgelist = graph.to_edge_list()
    assert len(edgelist.splitlines()) == len(graph.edges)
    sg, index = graph.as_simple_graph()
    assert sg.num_edges == len(graph.edges)
    assert sorted(index) == sorted(graph.vertices)


# ---------------------------------------------------------------------------
# Bipartite auxiliary graph


def test_bipartite_degree_law_and_four_cycles():
    g = GridParams(15, 1)
    S = [(0,), (1,), (4,), (9,)]
    U = [(2,), (3,), (6,), (7,), (11,)]
    B = build_bipartite_B(U, S, g)
    for u in B.u_vertices:
        assert B.degree_of_u(u) == len(S)
    assert sum(B.degrees_w().values()) == len(U) * len(S)
    assert check_four_cycle_free(B)


def test_bipartite_rejects_overlap_and_duplicates():
    g = GridParams(10, 1)
    S = [(0,), (1,)]
    with pytest.raises(ValueError):
        build_bipartite_B([(1,), (5,)], S, g)
    with pytest.raises(ValueError):
        build_bipartite_B([(5,), (5,)], S, g)


def test_four_cycle_appears_for_non_sidon_like_overlap():
    """Two U vertices at distance equal to two seed differences share two
    neighbors; with a fabricated adjacency the detector must fire."""
    from sidonlab.containers import BipartiteB

    fake = BipartiteB(GridParams(10, 1), (0,), (1, 2), {7: (1, 2), 9: (1, 2)})
    assert not check_four_cycle_free(fake)


def test_edge_count_identity_matches_direct_count():
    g = GridParams(20, 1)
    S = [(0,), (1,), (4,), (9,), (15,)]
    U = [(2,), (3,), (6,), (7,), (11,), (13,), (18,)]
    e_u, deg_sum = edge_count_identity(U, S, g)
    assert e_u == deg_sum
    graph = build_collision_graph(S, g)
    u_ranks = {p[0] for p in U}
    direct = sum(1 for a, b in graph.edges if a in u_ranks and b in u_ranks)
    assert e_u == direct


# ---------------------------------------------------------------------------
# Density lemma


def test_density_parameters():
    g = GridParams(16, 1)
    assert density_threshold(4, g) == 16.0
    assert density_beta(4, g) == 16 / (4 * 16)


def test_density_lemma_vacuous_small_n():
    g = GridParams(8, 1)
    rep = verify_density_lemma([(0,), (1,), (3,)], g)
    assert rep.status == "vacuous"  # threshold exceeds the vertex count


def test_density_lemma_nonvacuous_case():
    """n=25 with a 5-element seed is the smallest qualifying interval case:
    the threshold equals the vertex count exactly."""
    g = GridParams(25, 1)
    rep = verify_density_lemma([(0,), (1,), (3,), (7,), (12,)], g)
    assert rep.status == "pass"
    assert rep.exhaustive
    assert rep.checked == 1  # only U = all 20 remaining vertices qualifies
    assert rep.worst_ratio >= 1


def test_density_lemma_sampled_path():
    """A seed with a low threshold on a larger grid takes the sampled branch."""
    g = GridParams(40, 1)
    S = [(x,) for x in [0, 1, 4, 9, 15, 22, 32, 34]]
    rep = verify_density_lemma(S, g, samples=200, seed=1)
    assert not rep.exhaustive
    assert rep.status == "pass"
    assert rep.checked == 200


# ---------------------------------------------------------------------------
# Container lemma


def test_container_lemma_pass_and_hypothesis_paths():
    # C5 with beta = its exact minimum density over |U| >= 3
    edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]
    graph = SimpleGraph(5, edges)
    beta = min(
        graph.induced_edge_count(sum(1 << i for i in combo)) / math.comb(k, 2)
        for k in (3, 4, 5)
        for combo in combinations(range(5), k)
    )
    q = math.ceil(math.log(5 / 3) / beta)
    rep = verify_container_lemma(graph, R=3, beta=beta, q=q, r=1)
    assert rep.density_ok and rep.q_ok
    assert rep.status == "pass"
    assert rep.independent_count <= rep.bound
    # an inflated beta breaks the density hypothesis
    rep_bad = verify_container_lemma(graph, R=3, beta=0.99, q=q, r=1)
    assert rep_bad.status == "hypothesis not met"
    assert not rep_bad.density_ok


def test_container_lemma_guards():
    with pytest.raises(ValueError):
        verify_container_lemma(SimpleGraph(25, []), R=30, beta=0.5, q=1, r=1)
    with pytest.raises(ValueError):
        verify_container_lemma(SimpleGraph(10, []), R=0, beta=0.5, q=1, r=1)


# ---------------------------------------------------------------------------
# Closed-form bounds (cross-checked in plain float arithmetic)


def test_s0_large_float_oracle():
    for n, d in [(100, 1), (10**6, 1), (50, 3)]:
        expect = (d * 2 ** (d + 1)) ** (1 / 3) * n ** (d / 3) * math.log(n) ** (1 / 3)
        assert s0_large(n, d) == pytest.approx(expect, rel=1e-12)


def test_bound_large_value_and_hypothesis():
    rep = bound_large(10**6, 1, 2000)
    s0 = s0_large(10**6, 1)
    expect = (
        2 * 2 * s0 * math.log(10**6) + 2000 * math.log(math.e * 2**6 * 10**6 / 2000**2)
    ) / math.log(2)
    assert rep.log2_bound == pytest.approx(expect, rel=1e-12)
    assert rep.log2_bound == pytest.approx(41252.9883953983, abs=1e-6)  # frozen
    assert rep.extras["s0"] == pytest.approx(380.89824952811097, abs=1e-9)
    with pytest.raises(HypothesisError):
        bound_large(10**6, 1, 100)  # below 2*s0


def test_c_omega_cap():
    assert c_omega(4) == pytest.approx(4 * math.e / math.sqrt(2), rel=1e-12)
    for w in [4, 5, 8, 16, 100]:
        assert c_omega(w) <= 4 * math.e + 1e-9


def test_bound_small_value_and_hypotheses():
    rep = bound_small(10**6, 1, 4.0, 4.0)
    s_star = 2 ** (2 / 3) * (10**6) ** (1 / 3) * math.log(4.0) ** (1 / 3)
    t = 4.0 * s_star
    expect = t * math.log(4 * math.e * 10**6 / (t * 4.0 ** (1 - 0.5))) / math.log(2)
    assert rep.log2_bound == pytest.approx(expect, rel=1e-10)
    assert rep.extras["s_star"] == pytest.approx(s_star, rel=1e-12)
    with pytest.raises(HypothesisError):
        bound_small(10**6, 1, 0.5, 4.0)  # gamma <= 1
    with pytest.raises(HypothesisError):
        bound_small(10**6, 1, 4.0, 3.0)  # omega < 4
    with pytest.raises(HypothesisError):
        bound_small(100, 1, 50.0, 4.0)  # gamma above s*/2^(d+1)


def test_schedule_frozen_example():
    sched = schedule(8, 2)
    assert sched.K == 2
    assert sched.s == [2, 4, 8]
    assert sched.q == [2, 0.5]
    assert sched.r == [0, 3.5]
    assert sched.sq_ok
    assert sched.negative_r == []
    assert sched.sum_q == pytest.approx(2.5)
    with pytest.raises(HypothesisError):
        schedule(3, 2)  # t < 2*s0


def test_schedule_invariants_random():
    rng = np.random.default_rng(11)
    for _ in range(50):
        s0 = float(rng.uniform(1, 20))
        t = float(s0 * rng.uniform(2, 64))
        sched = schedule(t, s0)
        assert sched.s[-1] == pytest.approx(t)
        assert sched.s[0] == pytest.approx(t * 2**-sched.K)
        assert sched.s[0] >= s0 - 1e-9
        assert sched.s[0] < 2 * s0 + 1e-9
        for k in range(sched.K):
            assert sched.s[k + 1] == pytest.approx(2 * sched.s[k])
            assert sched.r[k] == pytest.approx(sched.s[k + 1] - sched.s[k] - sched.q[k])
        assert sched.sq_ok  # s_k^2 q_k = (t 2^{-K+k-1})^2 s0/4^{k-1} >= s0^3


def test_bound_small_t_regime_exact_oracle():
    for n, d in [(10, 1), (20, 1), (5, 2)]:
        M = n**d
        T = min(M, max(1, int(math.floor(n ** (d / 3) * math.log(n)))))
        exact = math.log2(sum(math.comb(M, t) for t in range(1, T + 1)))
        assert bound_small_t_regime(n, d) == pytest.approx(exact, rel=1e-12)
    with pytest.raises(HypothesisError):
        bound_small_t_regime(2, 1)
