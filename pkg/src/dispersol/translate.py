"""Moving solutions between distances δ and δ/(δ+1).

Shrinking the distance to δ/(δ+1) adds exactly one point per edge; growing
it back removes one per edge.  Both directions work edge by edge and are
validated with the auto-dispersion conditions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .graph import INF, Graph
from .metric import Point, dr_table, on_edge, points_by_edge, validate_auto_dispersed


class TranslationError(ValueError):
    """Input violates the precondition of a translation."""


@dataclass(frozen=True)
class TranslationCertificate:
    direction: str                  # "up" (towards δ/(δ+1)) or "down"
    delta_in: Fraction
    delta_out: Fraction
    rho: Fraction
    size_in: int
    size_out: int
    per_edge: dict = field(default_factory=dict)   # edge -> (points before, points after)
    empty_edges: dict = field(default_factory=dict)  # edge -> endpoint the new point was measured from


def _spread(start: Fraction, stop: Fraction, count: int) -> list[Fraction]:
    if count == 1:
        return [start]
    step = (stop - start) / (count - 1)
    return [start + i * step for i in range(count)]


def translate_up(g: Graph, points: Sequence[Point], delta, *, allow_above_three: bool = False):
    """Map a δ-auto-dispersed set to a (δ/(δ+1))-auto-dispersed set with one
    extra point per edge."""
    delta = Fraction(delta)
    if delta <= 0:
        raise TranslationError("delta must be positive")
    if delta > 3 and not allow_above_three:
        raise TranslationError("for delta > 3 plain and auto-dispersion differ; pass allow_above_three")
    pts = sorted(points)
    ok = validate_auto_dispersed(g, pts, delta)
    if not ok:
        raise TranslationError(f"input is not {delta}-auto-dispersed: {ok.detail}")
    rho = 1 / (delta + 1)
    on = points_by_edge(g, pts)
    dr = dr_table(g, pts)
    nearest = {u: min(((dr[(u, w)], w) for w in g.adj[u]), default=(INF, -1)) for u in range(g.n)}
    # a point on an isolated vertex lies on no edge and is carried over as is
    out = {p for p in pts if p.v is None and not g.adj[p.u]}
    per_edge = {}
    empty = {}
    for (u, v) in g.edges:
        pos = on[(u, v)]
        if pos:
            first = pos[0] * rho
            last = 1 - (1 - pos[-1]) * rho
            new = _spread(first, last, len(pos) + 1)
            per_edge[(u, v)] = (len(pos), len(new))
        else:
            a, b = (u, v) if (nearest[u][0], u) <= (nearest[v][0], v) else (v, u)
            d_a = nearest[a][0]
            lam = delta * rho / 2 if d_a == INF else max(delta * rho / 2, delta * rho - d_a * rho)
            new = [lam if a == u else 1 - lam]
            per_edge[(u, v)] = (0, 1)
            empty[(u, v)] = a
        out.update(on_edge(u, v, x) for x in new)
    result = sorted(out)
    cert = TranslationCertificate("up", delta, delta * rho, rho, len(pts), len(result), per_edge, empty)
    if len(result) != len(pts) + g.m:
        raise TranslationError(f"expected {len(pts) + g.m} points, built {len(result)}")
    ok = validate_auto_dispersed(g, result, delta * rho)
    if not ok:
        raise TranslationError(f"result is not {delta * rho}-auto-dispersed: {ok.detail}")
    return result, cert


def translate_down(g: Graph, points: Sequence[Point], delta_small):
    """Inverse of :func:`translate_up`: from δ' = δ/(δ+1) back to δ, removing
    one point per edge.  Every edge must carry a point."""
    delta_small = Fraction(delta_small)
    if not 0 < delta_small < 1:
        raise TranslationError("the smaller distance must lie in (0, 1)")
    delta = delta_small / (1 - delta_small)
    pts = sorted(points)
    ok = validate_auto_dispersed(g, pts, delta_small)
    if not ok:
        raise TranslationError(f"input is not {delta_small}-auto-dispersed: {ok.detail}")
    on = points_by_edge(g, pts)
    for e in g.edges:
        if not on[e]:
            raise TranslationError(f"edge {e} carries no point")
    grow = delta + 1
    out = {p for p in pts if p.v is None and not g.adj[p.u]}
    per_edge = {}
    for (u, v) in g.edges:
        pos = on[(u, v)]
        keep = len(pos) - 1
        new = []
        if keep:
            first = pos[0] * grow
            last = 1 - (1 - pos[-1]) * grow
            new = _spread(first, last, keep)
        per_edge[(u, v)] = (len(pos), keep)
        out.update(on_edge(u, v, x) for x in new)
    result = sorted(out)
    cert = TranslationCertificate("down", delta_small, delta, 1 / grow, len(pts), len(result), per_edge)
    if len(result) != len(pts) - g.m:
        raise TranslationError(
            f"expected {len(pts) - g.m} points, built {len(result)}: shared vertex points "
            "need one interior point on every edge"
        )
    ok = validate_auto_dispersed(g, result, delta)
    if not ok:
        raise TranslationError(f"result is not {delta}-auto-dispersed: {ok.detail}")
    return result, cert


def delta_descend_count(delta, m: int) -> tuple[Fraction, int]:
    """Apply ``a/b -> a/(b-a)`` while ``a/b <= 3/4``; each step is worth ``m``
    points.  Returns the final distance and the accumulated count."""
    delta = Fraction(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    a, b = delta.numerator, delta.denominator
    extra = 0
    while 4 * a <= 3 * b:
        b -= a
        extra += m
    return Fraction(a, b), extra
