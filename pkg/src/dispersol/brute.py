"""Exhaustive oracles: maximum independent sets by branch and bound, and the
grid-based dispersion and distance-d independent set solvers built on them."""

from __future__ import annotations

import sys
from fractions import Fraction
from itertools import combinations

from .graph import Graph, all_pairs_distances
from .metric import Point, enumerate_grid_points, point_distance


class SizeGuardError(RuntimeError):
    """Instance too large for an exhaustive oracle."""


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _clique_cover(nbr, cand):
    """Greedy clique cover size of the conflict graph on ``cand``: an upper
    bound on any independent set inside ``cand``."""
    k = 0
    while cand:
        low = cand & -cand
        clique = low
        common = nbr[low.bit_length() - 1] & cand
        while common:
            w = common & -common
            clique |= w
            common &= nbr[w.bit_length() - 1]
        cand &= ~clique
        k += 1
    return k


def max_independent_set(nbr: list[int]) -> list[int]:
    """Maximum independent set of the graph given by neighbour bitmasks."""
    n = len(nbr)
    best = [0, 0]   # size, mask
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 4 * n + 100))

    def rec(cand, chosen, size):
        while True:
            # vertices of degree <= 1 belong to some maximum solution
            for v in _bits(cand):
                if (nbr[v] & cand).bit_count() <= 1:
                    chosen |= 1 << v
                    size += 1
                    cand &= ~(nbr[v] | (1 << v))
                    break
            else:
                break
        if not cand:
            if size > best[0]:
                best[0], best[1] = size, chosen
            return
        if size + _clique_cover(nbr, cand) <= best[0]:
            return
        v = max(_bits(cand), key=lambda x: ((nbr[x] & cand).bit_count(), -x))
        rec(cand & ~(nbr[v] | (1 << v)), chosen | (1 << v), size + 1)
        rec(cand & ~(1 << v), chosen, size)

    try:
        rec((1 << n) - 1, 0, 0)
    finally:
        sys.setrecursionlimit(limit)
    return list(_bits(best[1]))


def brute_force_dis(g: Graph, d: int, *, max_vertices: int = 20) -> tuple[int, list[int]]:
    """Largest vertex set with pairwise hop distance ``>= d``."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if g.n > max_vertices:
        raise SizeGuardError(f"{g.n} vertices exceed the exhaustive limit {max_vertices}")
    apsp = all_pairs_distances(g)
    nbr = [0] * g.n
    for u, v in combinations(range(g.n), 2):
        if apsp[u][v] < d:
            nbr[u] |= 1 << v
            nbr[v] |= 1 << u
    chosen = max_independent_set(nbr)
    return len(chosen), sorted(chosen)


def brute_force_dispersion(g: Graph, delta, *, max_points: int = 60, apsp=None) -> tuple[int, list[Point]]:
    """Maximum ``delta``-dispersed set over the ``1/(2b)`` grid, ``delta = a/b``.

    Some optimum always lies on that grid, so the answer is exact.
    """
    delta = Fraction(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    npts = g.n + g.m * (2 * delta.denominator - 1)
    if npts > max_points:
        raise SizeGuardError(f"{npts} grid points exceed the exhaustive limit {max_points}")
    apsp = apsp or all_pairs_distances(g)
    pts = enumerate_grid_points(g, delta.denominator)
    nbr = [0] * len(pts)
    for i, j in combinations(range(len(pts)), 2):
        if point_distance(apsp, pts[i], pts[j]) < delta:
            nbr[i] |= 1 << j
            nbr[j] |= 1 << i
    chosen = max_independent_set(nbr)
    return len(chosen), sorted(pts[i] for i in chosen)
