"""The continuum P(G): points on vertices and edges, exact distances,
directions, half-integrality, and (auto-)dispersion validators."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .graph import INF, Graph

Rat = Fraction
HALF = Fraction(1, 2)


def parse_rat(text: str) -> Fraction:
    """Parse ``a/b`` or an integer into an exact rational."""
    try:
        value = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a rational number: {text!r}") from None
    if "." in text or "e" in text.lower():
        raise ValueError(f"give rationals as a/b, not decimals: {text!r}")
    return value


def fmt_rat(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def is_half_integral(x: Fraction) -> bool:
    return (2 * x).denominator == 1


# ---------------------------------------------------------------- points

@dataclass(frozen=True)
class Point:
    """A location in P(G).

    Vertex points have ``v is None`` and ``lam == 0``; interior points lie on
    edge ``(u, v)`` with ``u < v`` at distance ``0 < lam < 1`` from ``u``.
    Build points with :func:`vertex` and :func:`on_edge`, which canonicalize.
    """

    u: int
    v: int | None = None
    lam: Fraction = Fraction(0)

    @property
    def is_vertex(self) -> bool:
        return self.v is None

    @property
    def edge(self) -> tuple[int, int] | None:
        return None if self.v is None else (self.u, self.v)

    @property
    def half_integral(self) -> bool:
        return self.v is None or self.lam == HALF

    def sort_key(self):
        return (0, self.u, 0, 0) if self.v is None else (1, self.u, self.v, self.lam)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __le__(self, other):
        return self.sort_key() <= other.sort_key()

    def __gt__(self, other):
        return self.sort_key() > other.sort_key()

    def __ge__(self, other):
        return self.sort_key() >= other.sort_key()

    def position_from(self, x: int) -> Fraction:
        """Distance from endpoint ``x`` of this point's edge."""
        if self.v is None:
            raise ValueError("vertex points have no edge position")
        if x == self.u:
            return self.lam
        if x == self.v:
            return 1 - self.lam
        raise ValueError(f"{x} is not an endpoint of {self.edge}")

    def __str__(self):
        if self.v is None:
            return f"V {self.u}"
        return f"E {self.u} {self.v} {self.lam.numerator} {self.lam.denominator}"


def vertex(v: int) -> Point:
    return Point(v)


def on_edge(u: int, v: int, lam) -> Point:
    """The point at distance ``lam`` from ``u`` on edge ``{u, v}``."""
    lam = Fraction(lam)
    if not 0 <= lam <= 1:
        raise ValueError(f"edge position {lam} outside [0, 1]")
    if u > v:
        u, v, lam = v, u, 1 - lam
    if lam == 0:
        return Point(u)
    if lam == 1:
        return Point(v)
    return Point(u, v, lam)


def midpoint(u: int, v: int) -> Point:
    return on_edge(u, v, HALF)


def check_point(g: Graph, p: Point) -> None:
    if not 0 <= p.u < g.n:
        raise ValueError(f"vertex {p.u} not in graph")
    if p.v is not None:
        if not g.has_edge(p.u, p.v):
            raise ValueError(f"({p.u},{p.v}) is not an edge")
        if not 0 < p.lam < 1 or p.u >= p.v:
            raise ValueError(f"non-canonical point {p!r}")


def half_integral_points(g: Graph) -> list[Point]:
    """All vertices and edge midpoints: ``n + m`` points."""
    return [vertex(v) for v in range(g.n)] + [midpoint(u, v) for u, v in g.edges]


def enumerate_grid_points(g: Graph, b: int) -> list[Point]:
    """Points whose edge position is a multiple of ``1/(2b)``."""
    if b < 1:
        raise ValueError("granularity must be >= 1")
    pts = [vertex(v) for v in range(g.n)]
    for u, v in g.edges:
        pts.extend(Point(u, v, Fraction(j, 2 * b)) for j in range(1, 2 * b))
    return pts


# ---------------------------------------------------------------- point files

def parse_points(text: str, g: Graph | None = None) -> list[Point]:
    pts = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split("#", 1)[0].split()
        if not parts:
            continue
        try:
            if parts[0] == "V" and len(parts) == 2:
                p = vertex(int(parts[1]))
            elif parts[0] == "E" and len(parts) == 5:
                u, v, num, den = (int(x) for x in parts[1:])
                if u >= v:
                    raise ValueError("edge must be given with u < v")
                lam = Fraction(num, den)
                if not 0 < lam < 1:
                    raise ValueError("position must lie strictly between 0 and 1")
                p = on_edge(u, v, lam)
            else:
                raise ValueError("expected 'V v' or 'E u v num den'")
            if g is not None:
                check_point(g, p)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        pts.append(p)
    if len(set(pts)) != len(pts):
        raise ValueError("duplicate points")
    return sorted(pts)


def format_points(points: Iterable[Point]) -> str:
    return "".join(f"{p}\n" for p in sorted(points))


# ---------------------------------------------------------------- distances

def vertex_point_distance(apsp, w: int, q: Point):
    """Distance from vertex ``w`` to point ``q``."""
    if q.v is None:
        return apsp[w][q.u]
    return min(apsp[w][q.u] + q.lam, apsp[w][q.v] + 1 - q.lam)


def point_distance(apsp, p: Point, q: Point):
    """Exact shortest-path distance in P(G) (``math.inf`` across components)."""
    if p.v is None:
        return vertex_point_distance(apsp, p.u, q)
    if q.v is None:
        return vertex_point_distance(apsp, q.u, p)
    if p.edge == q.edge:
        # any route leaving the edge is at least 2 + (something) > 1
        return abs(p.lam - q.lam)
    a, b = p.lam, 1 - p.lam
    return min(
        a + vertex_point_distance(apsp, p.u, q),
        b + vertex_point_distance(apsp, p.v, q),
    )


class UndefinedDirection(ValueError):
    """Both endpoints of ``p``'s edge lie on shortest paths towards ``q``."""


def direction(g: Graph, apsp, p: Point, q: Point, extended: bool = False) -> tuple[int, int]:
    """Return ``(dir, dir_bar)``: the endpoint of ``p``'s edge that lies on
    every shortest path to ``q``, and the other endpoint.

    For half-integral ``p`` the direction may be undefined; with ``extended``
    ties are resolved towards the lower vertex id, and a vertex point ``p``
    yields ``(p, lowest neighbour)``.
    """
    if p == q:
        raise ValueError("direction needs distinct points")
    if p.v is None:
        if not extended:
            raise UndefinedDirection(f"{p} is a vertex")
        return p.u, g.adj[p.u][0]
    u, v = p.u, p.v
    if q.edge == p.edge:
        return (v, u) if p.lam < q.lam else (u, v)
    via_u = p.lam + vertex_point_distance(apsp, u, q)
    via_v = 1 - p.lam + vertex_point_distance(apsp, v, q)
    if via_u < via_v:
        return u, v
    if via_v < via_u:
        return v, u
    if not extended:
        raise UndefinedDirection(f"{p} has no unique direction towards {q}")
    return u, v


# ---------------------------------------------------------------- validators

@dataclass(frozen=True)
class Violation:
    """Why a point set is not (auto-)dispersed."""

    kind: str            # "pair", "A1" or "A2"
    detail: str
    items: tuple = ()
    value: object = None

    def __bool__(self):
        return False


def validate_dispersed(g: Graph, points: Sequence[Point], delta, apsp=None):
    """``True`` if all pairwise distances are ``>= delta``, else a :class:`Violation`
    naming the lexicographically first bad pair."""
    apsp = apsp or _apsp(g)
    pts = sorted(points)
    for p, q in combinations(pts, 2):
        d = point_distance(apsp, p, q)
        if d < delta:
            return Violation("pair", f"d({p}; {q}) = {_fmt(d)} < {fmt_rat(delta)}", (p, q), d)
    return True


def _apsp(g):
    from .graph import all_pairs_distances
    return all_pairs_distances(g)


def _fmt(x):
    return "inf" if x == INF else fmt_rat(x)


def points_by_edge(g: Graph, points: Iterable[Point]) -> dict[tuple[int, int], list[Fraction]]:
    """Positions (measured from the lower endpoint) of the points on each closed edge."""
    on = {e: [] for e in g.edges}
    for p in points:
        if p.v is None:
            for w in g.adj[p.u]:
                e = (min(p.u, w), max(p.u, w))
                on[e].append(Fraction(0) if p.u == e[0] else Fraction(1))
        else:
            on[p.edge].append(p.lam)
    for pos in on.values():
        pos.sort()
    return on


def dr_table(g: Graph, points: Iterable[Point]) -> dict[tuple[int, int], object]:
    """``dr(u, v)`` for every directed edge: the shortest walk from ``u`` that
    starts along ``{u, v}`` and ends on a point (``math.inf`` if none)."""
    on = points_by_edge(g, points)
    dr = {}
    heap = []
    for (a, b), pos in on.items():
        if pos:
            dr[(a, b)] = pos[0]
            dr[(b, a)] = 1 - pos[-1]
            heap.append((pos[0], a, b))
            heap.append((1 - pos[-1], b, a))
    heapq.heapify(heap)
    done = set()
    while heap:
        val, u, v = heapq.heappop(heap)
        if (u, v) in done:
            continue
        done.add((u, v))
        # (x, u) may continue through u into (u, v) unless x == v
        for x in g.adj[u]:
            if x == v or (x, u) in done:
                continue
            if on[(min(x, u), max(x, u))]:
                continue
            cand = val + 1
            if cand < dr.get((x, u), INF):
                dr[(x, u)] = cand
                heapq.heappush(heap, (cand, x, u))
    for u, v in g.edges:
        dr.setdefault((u, v), INF)
        dr.setdefault((v, u), INF)
    return dr


def dr(g: Graph, points: Iterable[Point], u: int, v: int):
    if not g.has_edge(u, v):
        raise ValueError(f"({u},{v}) is not an edge")
    return dr_table(g, points)[(u, v)]


def validate_auto_dispersed(g: Graph, points: Sequence[Point], delta):
    """Check the two local conditions characterising auto-dispersion.

    A1: the points on each closed edge are pairwise ``>= delta`` apart.
    A2: at every vertex ``u`` not in the set, any two distinct edges
    ``{u,v}``, ``{u,w}`` satisfy ``dr(u,v) + dr(u,w) >= delta``.
    """
    pts = sorted(points)
    if len(set(pts)) != len(pts):
        return Violation("A1", "duplicate points")
    on = points_by_edge(g, pts)
    for e in g.edges:
        pos = on[e]
        for a, b in zip(pos, pos[1:]):
            if b - a < delta:
                return Violation("A1", f"edge {e}: points {fmt_rat(a)} and {fmt_rat(b)} closer than {fmt_rat(delta)}", (e,), b - a)
    table = dr_table(g, pts)
    occupied = {p.u for p in pts if p.v is None}
    for u in range(g.n):
        if u in occupied:
            continue
        for v, w in combinations(g.adj[u], 2):
            total = table[(u, v)] + table[(u, w)]
            if total < delta:
                return Violation(
                    "A2",
                    f"at vertex {u}: dr({u},{v}) + dr({u},{w}) = {_fmt(total)} < {fmt_rat(delta)}",
                    ((u, v), (u, w)),
                    total,
                )
    return True

