"""Digit bijection, difference sets, and the dense constructions."""

import math
from itertools import combinations

import pytest

from sidonlab.constructions import (
    ConstructionError,
    DifferenceSetCertificate,
    _is_prime,
    _largest_prime_q,
    check_difference_set,
    dense_sidon_in_grid,
    dense_sidon_in_interval,
    greedy_sidon_interval,
    lift_sidon,
    phi_d,
    singer_sidon,
)
from sidonlab.grid import GridError, GridParams, is_sidon, rank

from conftest import naive_interval_is_sidon, naive_is_sidon


def test_phi_d_is_rank_inverse():
    g = GridParams(5, 3)
    for a in range(g.size):
        assert rank(phi_d(a, g), g) == a
    with pytest.raises(GridError):
        phi_d(g.size, g)


def test_lift_preserves_sidon_exhaustive():
    """Every Sidon subset of [0, m) lifts to a Sidon set of the grid, for
    every grid shape of every m <= 12."""
    shapes = {4: [(2, 2)], 8: [(2, 3)], 9: [(3, 2)]}
    for m in range(1, 13):
        grids = [GridParams(m, 1)] + [GridParams(n, d) for n, d in shapes.get(m, [])]
        for size in range(m + 1):
            for A in combinations(range(m), size):
                if not naive_interval_is_sidon(A):
                    continue
                for g in grids:
                    assert naive_is_sidon(lift_sidon(A, g))


def test_is_prime():
    primes = {2, 3, 5, 7, 11, 13, 17, 19, 23}
    for q in range(25):
        assert _is_prime(q) == (q in primes)


def test_check_difference_set():
    assert check_difference_set([0, 1, 3], 7)  # q=2 Singer set
    assert not check_difference_set([0, 1, 2], 7)
    assert not check_difference_set([0, 1, 3], 8)  # wrong modulus


def test_singer_small_primes():
    # frozen: the q=3 set modulo 13
    cert = singer_sidon(3)
    assert cert.modulus == 13
    assert cert.elements == (0, 1, 5, 11)
    assert cert.checked
    for q in [1, 2, 3, 5, 7, 11, 13]:
        cert = singer_sidon(q)
        assert cert.modulus == q * q + q + 1
        assert len(cert.elements) == q + 1
        assert check_difference_set(cert.elements, cert.modulus)
        # residues taken as plain integers are Sidon in Z as well
        assert naive_interval_is_sidon(cert.elements)


def test_singer_rejects_composite_q():
    with pytest.raises(ConstructionError):
        singer_sidon(6)


def test_certificate_json_roundtrip():
    cert = singer_sidon(5)
    assert DifferenceSetCertificate.from_json(cert.to_json()) == cert


def test_largest_prime_q():
    assert _largest_prime_q(7) == 2  # 2^2+2+1 = 7
    assert _largest_prime_q(12) == 2
    assert _largest_prime_q(13) == 3
    assert _largest_prime_q(1000) == 31  # 31^2+31+1 = 993
    assert _largest_prime_q(6) is None


def test_greedy_interval_is_sidon():
    for n in [1, 2, 10, 50, 300]:
        A = greedy_sidon_interval(n)
        assert naive_interval_is_sidon(A)
        assert all(0 <= x < n for x in A)
    assert greedy_sidon_interval(8) == [0, 1, 3, 7]  # the classic prefix


def test_dense_interval_size_floor_small_n():
    """Size >= 0.8*sqrt(n) down to n=16, including the prime-gap range
    n=26..30 where no fresh difference set is available."""
    for n in range(16, 600):
        A = dense_sidon_in_interval(n)
        assert naive_interval_is_sidon(A)
        assert all(0 <= x < n for x in A)
        assert len(A) >= 0.8 * math.sqrt(n), (n, len(A))


def test_dense_grid_lifts_and_verifies():
    for n, d in [(16, 1), (40, 1), (5, 2), (10, 2), (3, 3), (7, 3)]:
        g = GridParams(n, d)
        S = dense_sidon_in_grid(g)
        assert is_sidon(S, g).verdict
        if g.size >= 16:
            assert len(S) >= 0.8 * g.n ** (g.d / 2)


def test_dense_interval_rejects_bad_n():
    with pytest.raises(ConstructionError):
        dense_sidon_in_interval(0)
