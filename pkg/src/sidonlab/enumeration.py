"""Exact maximum Sidon set size and exact counts via pruned backtracking.

One depth-first engine drives everything: candidates are rank-sorted,
the set of still-addable candidates is a bitmask, and adding a point
masks off every candidate that would close a sum collision.  Counting
visits every Sidon subset once (each DFS node *is* a Sidon set); the
maximum search adds incumbent pruning and an optional node budget.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .constructions import dense_sidon_in_grid
from .grid import GridParams, Point, rank, unrank, validate_point

DEFAULT_COUNT_GUARD = 10**9


class CountTooLargeError(RuntimeError):
    """Exact count abandoned: the configured node guard was exceeded."""


class _BudgetExhausted(Exception):
    pass


@dataclass
class CountProfile:
    """counts[t] = number of Sidon subsets of the grid of size t."""

    g: GridParams
    counts: list[int]

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def max_size(self) -> int:
        return len(self.counts) - 1

    def to_csv(self) -> str:
        lines = ["t,count"]
        lines += [f"{t},{c}" for t, c in enumerate(self.counts)]
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps(
            {"n": self.g.n, "d": self.g.d, "counts": self.counts, "total": self.total}
        )


@dataclass
class MaxSidonResult:
    """Outcome of a maximum-Sidon-set search."""

    size: int
    witness: tuple[Point, ...]
    nodes_explored: int
    optimal: bool

    def to_json(self, g: GridParams) -> str:
        return json.dumps(
            {
                "size": self.size,
                "witness": [rank(p, g) for p in self.witness],
                "nodes_explored": self.nodes_explored,
                "optimal": self.optimal,
            }
        )


class _Engine:
    """Backtracking state over a fixed rank-sorted candidate list."""

    def __init__(self, points: Sequence[Point], g: GridParams):
        self.g = g
        self.pts: list[Point] = sorted((tuple(p) for p in points), key=lambda p: rank(p, g))
        self.index = {p: i for i, p in enumerate(self.pts)}
        self.full = (1 << len(self.pts)) - 1

    def forbidden(self, S: list[Point], x: Point) -> int:
        """Candidates that would break the Sidon property of S + [x] + [y].

        Only collisions involving x are new; collisions among S alone were
        masked off when their points were added.
        """
        index = self.index
        forb = 0
        T = S + [x]
        for t in T:
            sg = tuple(a + b for a, b in zip(x, t))
            for c in T:
                y = tuple(a - b for a, b in zip(sg, c))
                b = index.get(y)
                if b is not None:
                    forb |= 1 << b
            if all(v % 2 == 0 for v in sg):
                b = index.get(tuple(v // 2 for v in sg))
                if b is not None:
                    forb |= 1 << b
        for i, ai in enumerate(S):
            for bj in S[i:]:
                y = tuple(a + b - c for a, b, c in zip(ai, bj, x))
                b = index.get(y)
                if b is not None:
                    forb |= 1 << b
        return forb


def _count_all(eng: _Engine, max_nodes: int) -> list[int]:
    counts = [0] * (len(eng.pts) + 1)
    counts[0] = 1
    nodes = 0
    pts = eng.pts

    def rec(S: list[Point], ext: int) -> None:
        nonlocal nodes
        m = ext
        size1 = len(S) + 1
        while m:
            lsb = m & -m
            m ^= lsb
            nodes += 1
            if nodes > max_nodes:
                raise CountTooLargeError(
                    f"too large for exact count: node guard {max_nodes} exceeded"
                )
            x = pts[lsb.bit_length() - 1]
            counts[size1] += 1
            child = ext & ~eng.forbidden(S, x) & ~((lsb << 1) - 1)
            if child:
                rec(S + [x], child)

    rec([], eng.full)
    while counts and counts[-1] == 0:
        counts.pop()
    return counts


def _count_size(eng: _Engine, t: int, max_nodes: int) -> int:
    if t == 0:
        return 1
    if t > len(eng.pts):
        return 0
    nodes = 0
    pts = eng.pts
    total = 0

    def rec(S: list[Point], ext: int) -> None:
        nonlocal nodes, total
        m = ext
        size1 = len(S) + 1
        while m:
            if size1 + _popcount(m) - 1 < t:
                return  # even taking every remaining candidate cannot reach t
            lsb = m & -m
            m ^= lsb
            nodes += 1
            if nodes > max_nodes:
                raise CountTooLargeError(
                    f"too large for exact count: node guard {max_nodes} exceeded"
                )
            x = pts[lsb.bit_length() - 1]
            if size1 == t:
                total += 1
                continue
            child = ext & ~eng.forbidden(S, x) & ~((lsb << 1) - 1)
            if child and size1 + _popcount(child) >= t:
                rec(S + [x], child)

    rec([], eng.full)
    return total


def _popcount(x: int) -> int:
    return x.bit_count()


def _max_search(eng: _Engine, budget: int, incumbent: list[Point]) -> MaxSidonResult:
    g = eng.g
    best_set = sorted(incumbent, key=lambda p: rank(p, g))
    best_size = len(best_set)
    nodes = 0
    pts = eng.pts

    def rec(S: list[Point], ext: int) -> None:
        nonlocal nodes, best_set, best_size
        m = ext
        depth = len(S)
        while m:
            if depth + _popcount(m) <= best_size:
                return
            lsb = m & -m
            m ^= lsb
            nodes += 1
            if budget and nodes > budget:
                raise _BudgetExhausted
            x = pts[lsb.bit_length() - 1]
            T = S + [x]
            if depth + 1 > best_size:
                best_size = depth + 1
                best_set = list(T)
            child = ext & ~eng.forbidden(S, x) & ~((lsb << 1) - 1)
            if child:
                rec(T, child)

    optimal = True
    try:
        rec([], eng.full)
    except _BudgetExhausted:
        optimal = False
    return MaxSidonResult(best_size, tuple(best_set), nodes, optimal)


# ---------------------------------------------------------------------------
# Public operations


def max_sidon_exact(g: GridParams, budget: int = 0) -> MaxSidonResult:
    """Maximum Sidon set in the full grid (branch and bound, optional budget).

    The incumbent is seeded by the dense construction, so even
    budget-exhausted runs report a witness of size ~0.8*n^(d/2).
    budget = 0 means unlimited.
    """
    eng = _Engine([unrank(r, g) for r in range(g.size)], g)
    incumbent = sorted(dense_sidon_in_grid(g), key=lambda p: rank(p, g))
    return _max_search(eng, budget, incumbent)


def max_sidon_subset(
    R: Iterable[Sequence[int]],
    g: GridParams,
    budget: int = 0,
    incumbent: Optional[Iterable[Sequence[int]]] = None,
) -> MaxSidonResult:
    """Maximum Sidon subset of R (same search restricted to R).

    An optional incumbent (a Sidon subset of R) seeds the bound.
    """
    pts = [validate_point(p, g) for p in R]
    eng = _Engine(pts, g)
    inc = [validate_point(p, g) for p in incumbent] if incumbent is not None else []
    for p in inc:
        if p not in eng.index:
            raise ValueError(f"incumbent point {p} not in R")
    return _max_search(eng, budget, inc)


def count_profile(g: GridParams, max_nodes: int = DEFAULT_COUNT_GUARD) -> CountProfile:
    """Exact counts of Sidon subsets of the grid, by size."""
    eng = _Engine([unrank(r, g) for r in range(g.size)], g)
    return CountProfile(g, _count_all(eng, max_nodes))


def count_subsets_profile(
    R: Iterable[Sequence[int]], g: GridParams, max_nodes: int = DEFAULT_COUNT_GUARD
) -> CountProfile:
    """Exact counts of Sidon subsets of an arbitrary ground set R."""
    eng = _Engine([validate_point(p, g) for p in R], g)
    return CountProfile(g, _count_all(eng, max_nodes))


def count_of_size(g: GridParams, t: int, max_nodes: int = DEFAULT_COUNT_GUARD) -> int:
    """counts[t] alone, abandoning branches that cannot reach size t."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    eng = _Engine([unrank(r, g) for r in range(g.size)], g)
    return _count_size(eng, t, max_nodes)
