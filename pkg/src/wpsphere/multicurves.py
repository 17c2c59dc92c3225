"""Index sets of the factorial-moment sums.

A k-multicurve of separating curves on a punctured sphere cuts it into k+1
pieces; a piece with c cusps and d boundary curves is a ``PiecePair``.
The curves and pieces form a tree, with pieces as vertices.  Unnested
multicurves are stars (one piece carries all k curves); every other tree
is nested.  Cusp labels are never enumerated: they enter as multinomial
weights.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, NamedTuple


class PiecePair(NamedTuple):
    c: int
    d: int


@dataclass(frozen=True)
class NestedTypeCollection:
    """A multiset of k+1 pieces, stored in lexicographic order."""

    pieces: tuple
    truncated: bool = False

    @property
    def k(self) -> int:
        return len(self.pieces) - 1

    @property
    def n(self) -> int:
        return sum(p.c for p in self.pieces)

    def label_weight(self) -> int:
        """Ways to distribute n labeled cusps over the pieces of this multiset."""
        return multinomial_weight(self.n, [p.c for p in self.pieces]) // symmetry_of(self.pieces)

    def tree_count(self) -> int:
        return tree_count([p.d for p in self.pieces])

    def orbit_weight(self) -> int:
        """Ordered k-multicurve orbits with this type: k! * trees * label weight.

        Pieces with equal (c, d) are interchangeable, so the label weight
        divides by their multiplicities.
        """
        return math.factorial(self.k) * self.tree_count() * self.label_weight()


def symmetry_of(pieces) -> int:
    out = 1
    for mult in Counter(pieces).values():
        out *= math.factorial(mult)
    return out


def tree_count(degrees) -> int:
    """Labeled trees on len(degrees) vertices with these degrees: (V-2)!/prod (d-1)!."""
    v = len(degrees)
    if v == 1:
        return 1 if degrees[0] == 0 else 0
    if sum(degrees) != 2 * (v - 1) or min(degrees) < 1:
        return 0
    out = math.factorial(v - 2)
    for d in degrees:
        out //= math.factorial(d - 1)
    return out


def boundary_profiles(k: int) -> list:
    """Sorted d-multisets of k+1 pieces with sum 2k and 1 <= d < k."""
    out = []

    def rec(prefix, left, slots, lo):
        if slots == 0:
            if left == 0:
                out.append(tuple(prefix))
            return
        for d in range(lo, k):
            if d * slots > left or left - d < (slots - 1):
                break
            rec(prefix + [d], left - d, slots - 1, d)

    if k >= 1:
        rec([], 2 * k, k + 1, 1)
    return out


def enumerate_nested_types(k: int, n: int, c_max: int | None = None) -> Iterator[NestedTypeCollection]:
    """All nested type collections for k curves and n cusps, lexicographically.

    Conditions: sum c = n, sum d = 2k, 1 <= d < k, c + d >= 3.  Empty for
    k = 1 and k = 2.  With ``c_max`` only collections with every c <= c_max
    are produced and each carries ``truncated=True`` when the cutoff bites.
    """
    if k < 1 or n < 3:
        raise ValueError("need k >= 1 and n >= 3")
    cap = n if c_max is None else min(c_max, n)
    flag = cap < n
    pieces_needed = k + 1

    def rec(prefix, c_left, d_left, slots, last):
        if slots == 0:
            if c_left == 0 and d_left == 0:
                yield NestedTypeCollection(tuple(prefix), flag)
            return
        for c in range(last.c, min(cap, c_left) + 1):
            d_lo = last.d if c == last.c else 1
            for d in range(d_lo, k):
                if c + d < 3:
                    continue
                rest = slots - 1
                if d_left - d < rest or d_left - d > rest * (k - 1):
                    continue
                if c_left - c < rest * c:
                    continue
                yield from rec(prefix + [PiecePair(c, d)], c_left - c, d_left - d, rest, PiecePair(c, d))

    if k >= 3:
        yield from rec([], n, 2 * k, pieces_needed, PiecePair(0, 1))


def unnested_symmetry_factor(k: int) -> Fraction:
    """1/2 for a single curve (both sides qualify as the inner piece), else 1."""
    return Fraction(1, 2) if k == 1 else Fraction(1)


def unnested_last_min(k: int) -> int:
    """Least number of cusps on the piece carrying all k curves."""
    return {1: 2, 2: 1}.get(k, 0)


def enumerate_unnested_compositions(k: int, n: int, c_max: int | None = None) -> Iterator[tuple]:
    """Tuples (c_1..c_k), c_i >= 2, with n - sum c >= 2, 1, 0 for k = 1, 2, >= 3."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if n < 2 * k:
        return
    budget = n - unnested_last_min(k)
    cap = budget if c_max is None else min(c_max, budget)

    def rec(prefix, left, slots):
        if slots == 0:
            yield tuple(prefix)
            return
        for c in range(2, min(cap, left - 2 * (slots - 1)) + 1):
            yield from rec(prefix + [c], left - c, slots - 1)

    yield from rec([], budget, k)


def unnested_count_closed(k: int, n: int) -> int:
    """Number of unnested compositions: hockey-stick sum of C(s-k-1, k-1)."""
    if n < 2 * k:
        return 0
    top = n - unnested_last_min(k)
    return math.comb(top - k, k) if top >= 2 * k else 0


def multinomial_weight(n: int, cs) -> int:
    """n! / (c_1! ... c_k! (n - sum c)!)."""
    rest = n - sum(cs)
    if rest < 0 or min(cs, default=0) < 0:
        raise ValueError("parts exceed n")
    out = 1
    left = n
    for c in list(cs) + [rest]:
        out *= math.comb(left, c)
        left -= c
    return out


def log_multinomial_weight(n: int, cs) -> float:
    rest = n - sum(cs)
    if rest < 0:
        raise ValueError("parts exceed n")
    return math.lgamma(n + 1) - sum(math.lgamma(c + 1) for c in cs) - math.lgamma(rest + 1)
