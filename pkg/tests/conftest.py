"""Shared oracles and helpers, all independent of the library internals.

The oracles here are deliberately naive: quadruple scans and full
power-set enumeration.  They are the reference implementations the
optimized kernels are tested against.
"""

from __future__ import annotations

from itertools import combinations, product

import pytest

from sidonlab.grid import GridParams


def naive_is_sidon(points) -> bool:
    """Quadruple-scan reference check: all unordered pair sums distinct."""
    pts = sorted(set(tuple(p) for p in points))
    sums = [tuple(a + b for a, b in zip(p, q)) for p, q in combinations(pts, 2)]
    sums += [tuple(2 * c for c in p) for p in pts]
    return len(sums) == len(set(sums))


def naive_interval_is_sidon(A) -> bool:
    """Reference check for integer sets: all pairwise sums distinct."""
    a = sorted(set(int(x) for x in A))
    sums = [x + y for x, y in combinations(a, 2)] + [2 * x for x in a]
    return len(sums) == len(set(sums))


def all_grid_points(g: GridParams):
    return [p for p in product(range(g.n), repeat=g.d)]


def naive_count_profile(g: GridParams) -> list[int]:
    """Power-set filter: counts[t] = Sidon subsets of size t.  Feasible
    only for n^d <= 16 or so."""
    pts = all_grid_points(g)
    counts = [0] * (len(pts) + 1)
    for size in range(len(pts) + 1):
        for combo in combinations(pts, size):
            if naive_is_sidon(combo):
                counts[size] += 1
    while counts and counts[-1] == 0:
        counts.pop()
    return counts


def small_grids(max_size: int = 16):
    """All (n, d) with n^d <= max_size, skipping redundant n=1 dimensions."""
    grids = []
    for d in range(1, max_size.bit_length() + 1):
        n = 1 if d == 1 else 2
        while n**d <= max_size:
            grids.append(GridParams(n, d))
            n += 1
    return grids


@pytest.fixture(scope="session")
def naive_profiles():
    """Naive count profiles for every grid with n^d <= 16, keyed by (n, d)."""
    return {(g.n, g.d): naive_count_profile(g) for g in small_grids(16)}
