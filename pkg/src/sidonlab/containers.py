"""Collision graphs, the auxiliary bipartite graph, and counting bounds.

For a Sidon seed S, the collision graph joins two grid points outside S
whenever adding both would collide a pair of sums through S; Sidon
extensions of S are exactly independent sets of this graph.  This module
builds those graphs, verifies the density and container statements on
small instances, and evaluates the closed-form counting bounds in
log2-space with extended precision (113-bit mantissa via mpmath).
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Optional, Sequence

import numpy as np
from mpmath import mp, mpf

from .grid import GridParams, Point, is_sidon, rank, sum_rank, unrank, validate_point

mp.prec = 113

_LOG2E = mpf(1) / mp.log(2)


class HypothesisError(ValueError):
    """A lemma's hypothesis is violated by the given inputs."""


# ---------------------------------------------------------------------------
# Small generic graphs (bitmask adjacency)


class SimpleGraph:
    """Undirected graph on vertices 0..m-1 with bitmask adjacency."""

    def __init__(self, num_vertices: int, edges: Iterable[tuple[int, int]]):
        self.num_vertices = num_vertices
        self.adj = [0] * num_vertices
        self.edges: set[tuple[int, int]] = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            u, v = (u, v) if u < v else (v, u)
            if (u, v) in self.edges:
                continue
            self.edges.add((u, v))
            self.adj[u] |= 1 << v
            self.adj[v] |= 1 << u

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def induced_edge_count(self, mask: int) -> int:
        e = 0
        m = mask
        while m:
            lsb = m & -m
            m ^= lsb
            v = lsb.bit_length() - 1
            e += (self.adj[v] & mask).bit_count()
        return e // 2


def count_independent_sets(graph: SimpleGraph, k: int, guard: int = 30) -> int:
    """Exact number of independent sets of size k, by backtracking."""
    if graph.num_vertices > guard:
        raise ValueError(f"graph has {graph.num_vertices} vertices, exhaustive guard is {guard}")
    if k == 0:
        return 1
    adj = graph.adj
    total = 0

    def rec(allowed: int, size: int) -> None:
        nonlocal total
        m = allowed
        while m:
            if size + m.bit_count() < k:
                return
            lsb = m & -m
            m ^= lsb
            v = lsb.bit_length() - 1
            if size + 1 == k:
                total += 1
                continue
            child = allowed & ~adj[v] & ~((lsb << 1) - 1)
            if child:
                rec(child, size + 1)

    rec((1 << graph.num_vertices) - 1, 0)
    return total


# ---------------------------------------------------------------------------
# Collision graph G_S and the auxiliary bipartite graph B


@dataclass
class CollisionGraph:
    """Graph on the grid minus a Sidon seed; vertices/edges rank-encoded."""

    g: GridParams
    seed: tuple[int, ...]  # ranks of S, sorted
    vertices: tuple[int, ...]  # ranks, sorted
    edges: frozenset  # frozenset of (u, v) rank pairs, u < v

    def as_simple_graph(self) -> tuple[SimpleGraph, dict[int, int]]:
        """Reindex to 0..N-1; returns the graph and the rank->index map."""
        index = {r: i for i, r in enumerate(self.vertices)}
        sg = SimpleGraph(len(self.vertices), [(index[u], index[v]) for u, v in self.edges])
        return sg, index

    def to_edge_list(self) -> str:
        lines = [f"{u} {v}" for u, v in sorted(self.edges)]
        return "\n".join(lines) + ("\n" if lines else "")

    def to_dimacs(self) -> str:
        lines = [f"p edge {len(self.vertices)} {len(self.edges)}"]
        lines += [f"e {u} {v}" for u, v in sorted(self.edges)]
        return "\n".join(lines) + "\n"


def _require_sidon(S: Sequence[Point], g: GridParams) -> list[Point]:
    pts = [validate_point(p, g) for p in S]
    w = is_sidon(pts, g)
    if not w.verdict:
        raise HypothesisError(f"seed is not Sidon: violating quadruple {w.violation}")
    return sorted(set(pts), key=lambda p: rank(p, g))


def build_collision_graph(S: Iterable[Sequence[int]], g: GridParams) -> CollisionGraph:
    """Exact edge set of G_S, built by bucketing the sums v+b over b in S.

    Vertices sharing a sum bucket form a clique; for a Sidon seed every
    vertex pair appears in at most one bucket.
    """
    seed_pts = _require_sidon(list(S), g)
    seed_ranks = {rank(p, g) for p in seed_pts}
    vertices = [r for r in range(g.size) if r not in seed_ranks]
    buckets: dict[int, list[int]] = defaultdict(list)
    for v in vertices:
        vp = unrank(v, g)
        for b in seed_pts:
            buckets[sum_rank(vp, b, g)].append(v)
    edges = set()
    for group in buckets.values():
        if len(group) > 1:
            group.sort()
            for u, v in combinations(group, 2):
                edges.add((u, v))
    return CollisionGraph(
        g, tuple(sorted(seed_ranks)), tuple(vertices), frozenset(edges)
    )


@dataclass
class BipartiteB:
    """Bipartite graph between sum points (base-(2n-1) ranks) and U."""

    g: GridParams
    seed: tuple[int, ...]  # ranks of S
    u_vertices: tuple[int, ...]  # ranks of U, sorted
    adjacency: dict  # sum rank -> sorted tuple of U ranks

    def degree_of_u(self, u: int) -> int:
        return sum(1 for us in self.adjacency.values() if u in us)

    def degrees_w(self) -> dict[int, int]:
        return {w: len(us) for w, us in self.adjacency.items()}


def build_bipartite_B(
    U: Iterable[Sequence[int]], S: Iterable[Sequence[int]], g: GridParams
) -> BipartiteB:
    """w adjacent to u iff w = u + b for some b in S; deg(u) = |S| always."""
    seed_pts = _require_sidon(list(S), g)
    seed_ranks = {rank(p, g) for p in seed_pts}
    u_pts = [validate_point(p, g) for p in U]
    u_ranks = sorted(rank(p, g) for p in u_pts)
    if len(set(u_ranks)) != len(u_ranks):
        raise ValueError("U contains duplicate points")
    for r in u_ranks:
        if r in seed_ranks:
            raise ValueError(f"U must be disjoint from the seed (rank {r})")
    adjacency: dict[int, list[int]] = defaultdict(list)
    for ur in u_ranks:
        up = unrank(ur, g)
        for b in seed_pts:
            adjacency[sum_rank(up, b, g)].append(ur)
    return BipartiteB(
        g,
        tuple(sorted(seed_ranks)),
        tuple(u_ranks),
        {w: tuple(sorted(us)) for w, us in adjacency.items()},
    )


def check_four_cycle_free(B: BipartiteB) -> bool:
    """True iff no two U vertices share two common sum-point neighbors."""
    pair_counts: Counter = Counter()
    for us in B.adjacency.values():
        for pair in combinations(us, 2):
            pair_counts[pair] += 1
            if pair_counts[pair] >= 2:
                return False
    return True


def _difference_set(seed_pts: Sequence[Point]) -> set[Point]:
    diffs = set()
    for b1 in seed_pts:
        for b2 in seed_pts:
            if b1 != b2:
                diffs.add(tuple(a - b for a, b in zip(b1, b2)))
    return diffs


def edge_count_identity(
    U: Iterable[Sequence[int]], S: Iterable[Sequence[int]], g: GridParams
) -> tuple[int, int]:
    """(e(U), sum over sum points of C(deg, 2)), computed independently.

    e(U) counts induced collision-graph edges directly via the seed's
    difference set; the second component comes from the degrees of B.
    """
    seed_pts = _require_sidon(list(S), g)
    u_pts = sorted((validate_point(p, g) for p in U), key=lambda p: rank(p, g))
    diffs = _difference_set(seed_pts)
    e_u = 0
    for p1, p2 in combinations(u_pts, 2):
        if tuple(a - b for a, b in zip(p1, p2)) in diffs:
            e_u += 1
    B = build_bipartite_B(u_pts, seed_pts, g)
    deg_sum = sum(len(us) * (len(us) - 1) // 2 for us in B.adjacency.values())
    return e_u, deg_sum


# ---------------------------------------------------------------------------
# Density lemma verification


@dataclass(frozen=True)
class DensityCertificate:
    """Parameters (R, beta): every |U| >= R has e(U) >= beta * C(|U|, 2)."""

    R: float
    beta: float


@dataclass
class DensityReport:
    status: str  # "pass", "fail", or "vacuous"
    certificate: DensityCertificate
    num_vertices: int
    checked: int
    failures: int
    worst_ratio: Optional[float]  # min e(U) / (beta * C(|U|,2)) observed
    exhaustive: bool


def density_threshold(s: int, g: GridParams) -> float:
    """Minimum |U| for the density lemma: (2^(d+1)/s) * n^d."""
    return (2 ** (g.d + 1) / s) * g.size


def density_beta(s: int, g: GridParams) -> float:
    """Edge-density ratio of the lemma: s^2 / (2^(d+1) * n^d)."""
    return s * s / (2 ** (g.d + 1) * g.size)


_EXHAUSTIVE_VERTEX_LIMIT = 20


def verify_density_lemma(
    S: Iterable[Sequence[int]],
    g: GridParams,
    samples: int = 10_000,
    seed: int = 0,
) -> DensityReport:
    """Check e(U) >= beta * C(|U|,2) for qualifying U, exhaustively when
    the vertex count is at most 20, otherwise on sampled U."""
    seed_pts = _require_sidon(list(S), g)
    s = len(seed_pts)
    if s == 0:
        raise HypothesisError("seed must be nonempty")
    cert = DensityCertificate(density_threshold(s, g), density_beta(s, g))
    graph = build_collision_graph(seed_pts, g)
    sg, _ = graph.as_simple_graph()
    N = len(graph.vertices)
    min_size = math.ceil(cert.R)
    if min_size > N:
        return DensityReport("vacuous", cert, N, 0, 0, None, True)

    checked = 0
    failures = 0
    worst: Optional[float] = None

    def check_mask(mask: int, size: int) -> None:
        nonlocal checked, failures, worst
        e_u = sg.induced_edge_count(mask)
        bound = cert.beta * size * (size - 1) / 2
        ratio = e_u / bound if bound > 0 else float("inf")
        checked += 1
        if e_u < bound:
            failures += 1
        if worst is None or ratio < worst:
            worst = ratio

    if N <= _EXHAUSTIVE_VERTEX_LIMIT:
        for size in range(max(min_size, 2), N + 1):
            for combo in combinations(range(N), size):
                mask = 0
                for i in combo:
                    mask |= 1 << i
                check_mask(mask, size)
        return DensityReport(
            "pass" if failures == 0 else "fail", cert, N, checked, failures, worst, True
        )

    rng = np.random.Generator(np.random.Philox(key=seed))
    for _ in range(samples):
        size = int(rng.integers(max(min_size, 2), N + 1))
        chosen = rng.choice(N, size=size, replace=False)
        mask = 0
        for i in chosen:
            mask |= 1 << int(i)
        check_mask(mask, size)
    return DensityReport(
        "pass" if failures == 0 else "fail", cert, N, checked, failures, worst, False
    )


# ---------------------------------------------------------------------------
# Container lemma verification


@dataclass
class ContainerReport:
    status: str  # "pass", "fail", or "hypothesis not met"
    N: int
    R: int
    beta: float
    q: int
    r: int
    independent_count: Optional[int]
    bound: Optional[int]
    density_ok: bool
    q_ok: bool


def verify_container_lemma(
    graph: SimpleGraph, R: int, beta: float, q: int, r: int
) -> ContainerReport:
    """Check: #independent sets of size q+r <= C(N, q) * C(R, r), after
    machine-verifying the density hypothesis and q >= beta^-1 log(N/R)."""
    N = graph.num_vertices
    if N > _EXHAUSTIVE_VERTEX_LIMIT:
        raise ValueError(f"{N} vertices: density hypothesis check is exhaustive, limit 20")
    if not (0 < R <= N):
        raise ValueError(f"need 0 < R <= N, got R={R}, N={N}")
    density_ok = True
    for size in range(max(R, 2), N + 1):
        for combo in combinations(range(N), size):
            mask = 0
            for i in combo:
                mask |= 1 << i
            if graph.induced_edge_count(mask) < beta * size * (size - 1) / 2:
                density_ok = False
                break
        if not density_ok:
            break
    q_ok = q >= math.log(N / R) / beta if beta > 0 else False
    if not (density_ok and q_ok):
        return ContainerReport("hypothesis not met", N, R, beta, q, r, None, None, density_ok, q_ok)
    count = count_independent_sets(graph, q + r)
    bound = math.comb(N, q) * math.comb(R, r)
    status = "pass" if count <= bound else "fail"
    return ContainerReport(status, N, R, beta, q, r, count, bound, density_ok, q_ok)


# ---------------------------------------------------------------------------
# Closed-form bound evaluators (log2-space, 113-bit precision)


def s0_large(n: int, d: int) -> float:
    """Seed size for the doubling regime: (d*2^(d+1))^(1/3) n^(d/3) (ln n)^(1/3)."""
    return float((mpf(d) * 2 ** (d + 1)) ** (mpf(1) / 3) * mpf(n) ** (mpf(d) / 3) * mp.log(n) ** (mpf(1) / 3))


@dataclass
class BoundReport:
    inputs: dict
    log2_bound: float
    hypothesis_ok: bool
    extras: dict = field(default_factory=dict)

    def to_json(self) -> str:
        import json

        return json.dumps(
            {
                "inputs": self.inputs,
                "log2_bound": self.log2_bound,
                "hypothesis_ok": self.hypothesis_ok,
                **self.extras,
            }
        )


def bound_large(n: int, d: int, t: float) -> BoundReport:
    """log2 of  n^(2(d+1)s0) * (e * 2^(d+5) * n^d / t^2)^t,  for t >= 2*s0."""
    if n < 2:
        raise HypothesisError("need n >= 2")
    s0 = mpf(s0_large(n, d))
    if t < 2 * s0:
        raise HypothesisError(f"t={t} below hypothesis threshold 2*s0={float(2 * s0)}")
    t_ = mpf(t)
    base = mp.e * 2 ** (d + 5) * mpf(n) ** d / t_**2
    log2_bound = 2 * (d + 1) * s0 * mp.log(n) * _LOG2E + t_ * mp.log(base) * _LOG2E
    return BoundReport(
        {"n": n, "d": d, "t": t},
        float(log2_bound),
        True,
        {"s0": float(s0)},
    )


def c_omega(omega: float) -> float:
    """C_omega = e*omega / (omega-2)^(1-2/omega); at most 4e for omega >= 4."""
    w = mpf(omega)
    return float(mp.e * w / (w - 2) ** (1 - 2 / w))


def bound_small(n: int, d: int, gamma: float, omega: float) -> BoundReport:
    """log2 of  (4e n^d / (t gamma^(1-2/omega)))^t  with t = omega * s*.

    s* = 2^((d+1)/3) n^(d/3) (ln gamma)^(1/3); requires
    0 < gamma < s*/2^(d+1) and omega >= 4.
    """
    if gamma <= 1:
        raise HypothesisError(f"gamma={gamma}: need gamma > 1 so that log(gamma) > 0")
    if omega < 4:
        raise HypothesisError(f"omega={omega} < 4")
    s_star = mpf(2) ** (mpf(d + 1) / 3) * mpf(n) ** (mpf(d) / 3) * mp.log(gamma) ** (mpf(1) / 3)
    if not gamma < s_star / 2 ** (d + 1):
        raise HypothesisError(
            f"gamma={gamma} not below s*/2^(d+1)={float(s_star / 2 ** (d + 1))}"
        )
    t = omega * s_star
    cw = c_omega(omega)
    if cw > 4 * math.e + 1e-12:
        raise AssertionError(f"C_omega={cw} exceeds 4e")  # cannot happen for omega >= 4
    base = 4 * mp.e * mpf(n) ** d / (t * mpf(gamma) ** (1 - 2 / mpf(omega)))
    log2_bound = t * mp.log(base) * _LOG2E
    return BoundReport(
        {"n": n, "d": d, "gamma": gamma, "omega": omega},
        float(log2_bound),
        True,
        {"s_star": float(s_star), "t": float(t), "c_omega": cw},
    )


@dataclass
class DoublingSchedule:
    """Doubling iteration s_k = 2 s_{k-1}, q_k = q_{k-1}/4 from s0 up to t."""

    t: float
    s0: float
    K: int
    s: list[float]  # s_1 .. s_{K+1}; s_{K+1} = t
    q: list[float]  # q_1 .. q_K
    r: list[float]  # r_k = s_{k+1} - s_k - q_k
    sq_ok: bool  # s_k^2 q_k >= s0^3 for k <= K
    sum_q: float
    negative_r: list[int]  # indices k (1-based) with r_k < 0


def schedule(t: float, s0: float) -> DoublingSchedule:
    """The sequences s_k, q_k, r_k for k = 1..K, K maximal with t*2^-K >= s0."""
    if s0 <= 0 or t < 2 * s0:
        raise HypothesisError(f"need t >= 2*s0 > 0, got t={t}, s0={s0}")
    K = int(math.floor(math.log2(t / s0)))
    while t * 2 ** -(K + 1) >= s0:
        K += 1
    while t * 2**-K < s0:
        K -= 1
    s = [t * 2 ** (-K + k - 1) for k in range(1, K + 2)]
    q = [s0 / 4 ** (k - 1) for k in range(1, K + 1)]
    r = [s[k] - s[k - 1] - q[k - 1] for k in range(1, K + 1)]
    sq_ok = all(s[k - 1] ** 2 * q[k - 1] >= s0**3 * (1 - 1e-12) for k in range(1, K + 1))
    negative_r = [k for k in range(1, K + 1) if r[k - 1] < 0]
    return DoublingSchedule(t, s0, K, s, q, r, sq_ok, sum(q), negative_r)


def bound_small_t_regime(n: int, d: int) -> float:
    """log2 of the binomial-sum bound sum_{t<=n^(d/3) ln n} C(n^d, t)."""
    if n < 3:
        raise HypothesisError(f"need n >= 3, got {n}")
    M = n**d
    T = min(M, max(1, int(math.floor(n ** (d / 3) * math.log(n)))))
    # log-space sum of binomials, exact up to float rounding
    logs = []
    for t in range(1, T + 1):
        logs.append(math.lgamma(M + 1) - math.lgamma(t + 1) - math.lgamma(M - t + 1))
    m = max(logs)
    total = m + math.log(sum(math.exp(x - m) for x in logs))
    return total / math.log(2)
