"""Constructive lower bounds: the digit bijection and dense Sidon sets.

The bijection phi_d sends an integer a < n^d to its base-n digit vector;
it maps Sidon sets of the interval [0, n^d) to Sidon sets of the grid.
Dense interval Sidon sets come from perfect difference sets modulo
q^2+q+1 (prime q), certified post hoc, with a greedy fallback at small n.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from .grid import GridParams, GridError, Point, is_sidon, unrank


class ConstructionError(ValueError):
    """Unsupported parameters or a certificate that failed its check."""


# ---------------------------------------------------------------------------
# Digit bijection


def phi_d(a: int, g: GridParams) -> Point:
    """Base-n digits of a, least significant first; inverse of rank."""
    if not (0 <= a < g.size):
        raise GridError(f"phi_d argument {a} outside [0, {g.size})")
    return unrank(a, g)


def lift_sidon(A: Iterable[int], g: GridParams) -> set[Point]:
    """Image of A under phi_d.  Sidon sets of [0, n^d) map to Sidon sets."""
    return {phi_d(a, g) for a in A}


# ---------------------------------------------------------------------------
# Perfect difference sets (Singer)


@dataclass(frozen=True)
class DifferenceSetCertificate:
    """A (q+1)-element set of residues mod q^2+q+1, every nonzero residue
    arising exactly once as a difference of two distinct elements."""

    modulus: int
    elements: tuple[int, ...]
    checked: bool

    def to_json(self) -> str:
        return json.dumps(
            {"modulus": self.modulus, "elements": list(self.elements), "checked": self.checked}
        )

    @staticmethod
    def from_json(text: str) -> "DifferenceSetCertificate":
        obj = json.loads(text)
        return DifferenceSetCertificate(
            int(obj["modulus"]), tuple(int(x) for x in obj["elements"]), bool(obj["checked"])
        )


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q < 4:
        return True
    if q % 2 == 0:
        return False
    f = 3
    while f * f <= q:
        if q % f == 0:
            return False
        f += 2
    return True


def _prime_factors(x: int) -> list[int]:
    out = []
    f = 2
    while f * f <= x:
        if x % f == 0:
            out.append(f)
            while x % f == 0:
                x //= f
        f += 1
    if x > 1:
        out.append(x)
    return out


def _poly_mul(a: tuple, b: tuple, f: tuple, q: int) -> tuple:
    # product of two degree-<3 polynomials modulo the monic cubic x^3 + f2 x^2 + f1 x + f0
    prod = [0] * 5
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % q
    for k in (4, 3):
        c = prod[k]
        if c:
            prod[k] = 0
            prod[k - 1] = (prod[k - 1] - c * f[2]) % q
            prod[k - 2] = (prod[k - 2] - c * f[1]) % q
            prod[k - 3] = (prod[k - 3] - c * f[0]) % q
    return (prod[0], prod[1], prod[2])


def _poly_pow_x(e: int, f: tuple, q: int) -> tuple:
    result = (1, 0, 0)
    base = (0, 1, 0)
    while e:
        if e & 1:
            result = _poly_mul(result, base, f, q)
        base = _poly_mul(base, base, f, q)
        e >>= 1
    return result


def _primitive_roots_mod(q: int):
    """Generators of the multiplicative group of Z_q, ascending."""
    if q == 2:
        yield 1
        return
    factors = _prime_factors(q - 1)
    for g in range(2, q):
        if all(pow(g, (q - 1) // ell, q) != 1 for ell in factors):
            yield g


def _primitive_cubic(q: int) -> tuple:
    """Monic irreducible cubic over Z_q for which x generates GF(q^3)*.

    The norm of x is -f0, and a generator of GF(q^3)* must have a norm
    generating GF(q)*, so only constant terms f0 = -g (g a primitive root
    mod q) can work; scanning other f0 values would be wasted effort.
    """
    order = q**3 - 1
    cofactors = [order // ell for ell in _prime_factors(order)]
    cubes = [r**3 % q for r in range(q)]
    for g in _primitive_roots_mod(q):
        f0 = (-g) % q
        for f1 in range(q):
            for f2 in range(q):
                f = (f0, f1, f2)
                # a cubic is irreducible over Z_q iff it has no root
                if any((cubes[r] + f2 * r * r + f1 * r + f0) % q == 0 for r in range(q)):
                    continue
                if all(_poly_pow_x(c, f, q) != (1, 0, 0) for c in cofactors):
                    return f
    raise ConstructionError(f"no primitive cubic found over Z_{q}")


def check_difference_set(elements: Iterable[int], modulus: int) -> bool:
    """True iff every nonzero residue arises exactly once as a difference."""
    elems = sorted(set(int(e) % modulus for e in elements))
    seen = set()
    for i, a in enumerate(elems):
        for b in elems[:i]:
            for diff in ((a - b) % modulus, (b - a) % modulus):
                if diff in seen:
                    return False
                seen.add(diff)
    return len(seen) == modulus - 1


def _difference_set_backtrack(modulus: int, size: int) -> tuple[int, ...] | None:
    """Exhaustive difference-set search, feasible for tiny moduli only."""

    def extend(chosen: list[int], used: set[int]) -> tuple[int, ...] | None:
        if len(chosen) == size:
            return tuple(chosen)
        start = chosen[-1] + 1 if chosen else 0
        for cand in range(start, modulus):
            new = []
            ok = True
            for c in chosen:
                for diff in ((cand - c) % modulus, (c - cand) % modulus):
                    if diff in used or diff in new:
                        ok = False
                        break
                    new.append(diff)
                if not ok:
                    break
            if ok:
                used.update(new)
                got = extend(chosen + [cand], used)
                if got is not None:
                    return got
                used.difference_update(new)
        return None

    return extend([], set())


@lru_cache(maxsize=None)
def singer_sidon(q: int) -> DifferenceSetCertificate:
    """Perfect difference set mod q^2+q+1 of size q+1, for prime q (or q=1).

    Built from powers of a primitive element of GF(q^3): the exponents i
    in [0, q^2+q+1) whose power lies in the 2-dimensional subspace
    spanned by {1, x} form the set.  Certified by check_difference_set;
    an exhaustive backtracking search backs up tiny q.
    """
    if q == 1:
        return DifferenceSetCertificate(3, (0, 1), True)
    if not _is_prime(q):
        raise ConstructionError(f"q={q} is not prime (prime powers unsupported)")
    m = q * q + q + 1
    elements: tuple[int, ...] | None = None
    try:
        f = _primitive_cubic(q)
        c = (1, 0, 0)
        found = []
        for i in range(m):
            if c[2] == 0:
                found.append(i)
            c2 = c[2]
            c = ((-f[0] * c2) % q, (c[0] - f[1] * c2) % q, (c[1] - f[2] * c2) % q)
        if len(found) == q + 1 and check_difference_set(found, m):
            elements = tuple(found)
    except ConstructionError:
        elements = None
    if elements is None and q <= 7:
        elements = _difference_set_backtrack(m, q + 1)
    if elements is None or not check_difference_set(elements, m):
        raise ConstructionError(f"failed to construct a difference set for q={q}")
    return DifferenceSetCertificate(m, elements, True)


# ---------------------------------------------------------------------------
# Dense Sidon sets


def _largest_prime_q(n: int) -> int | None:
    """Largest prime q with q^2 + q + 1 <= n, or None if none exists."""
    q = int((n - 1) ** 0.5) + 1
    while q * q + q + 1 > n:
        q -= 1
    while q >= 2 and not _is_prime(q):
        q -= 1
    return q if q >= 2 else None


def greedy_sidon_interval(n: int) -> list[int]:
    """Ascending greedy Sidon set in [0, n) via a forbidden-difference set."""
    chosen: list[int] = []
    diffs: set[int] = set()
    for x in range(n):
        new = [x - c for c in chosen]
        if any(d in diffs for d in new) or len(set(new)) != len(new):
            continue
        diffs.update(new)
        chosen.append(x)
    return chosen


_GREEDY_CUTOFF = 2048


def dense_sidon_in_interval(n: int) -> list[int]:
    """A verified Sidon subset of [0, n), size >= 0.8*sqrt(n) for n >= 16.

    Takes the Singer difference set for the largest prime q with
    q^2+q+1 <= n (its residues already lie in [0, n)); for small n,
    where prime gaps bite, the ascending greedy set is taken when larger.
    """
    if n < 1:
        raise ConstructionError(f"n must be >= 1, got {n}")
    q = _largest_prime_q(n)
    best: list[int] = [] if q is None else sorted(singer_sidon(q).elements)
    if n <= _GREEDY_CUTOFF:
        greedy = greedy_sidon_interval(n)
        if len(greedy) > len(best):
            best = greedy
    return best


def dense_sidon_in_grid(g: GridParams) -> set[Point]:
    """phi_d image of a dense interval Sidon set; verified Sidon on exit."""
    A = dense_sidon_in_interval(g.size)
    S = lift_sidon(A, g)
    witness = is_sidon(S, g)
    if not witness.verdict:
        raise ConstructionError(f"constructed set failed Sidon check: {witness.violation}")
    return S
