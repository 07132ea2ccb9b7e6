"""Rounding a dispersed set up to a distance with a small numerator.

A δ-dispersed set is pushed continuously: every point moves along its edge
with a fixed signed speed until some pair becomes critical, a point becomes
half-integral, or a half-integral point starts to sit halfway between a
critical pair.  Repeating this reaches δ* without losing a point.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Sequence

from .graph import INF, Graph, all_pairs_distances
from .metric import (
    HALF,
    Point,
    direction,
    half_integral_points,
    on_edge,
    point_distance,
    validate_dispersed,
)


class RoundingError(RuntimeError):
    """An internal invariant of the pushing procedure failed."""


# ---------------------------------------------------------------- δ*

@dataclass(frozen=True)
class RoundedDelta:
    delta_star: Fraction
    numerator_bound: int


def round_up_delta(delta, L: int) -> RoundedDelta:
    """Smallest rational ``a/b >= delta`` with ``a <= 2L + 2``.

    Stern–Brocot descent with runs of equal turns taken in one jump.
    Raises ``ValueError`` when ``delta > 2L + 2`` (no such rational exists).
    """
    delta = Fraction(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    bound = 2 * L + 2
    if delta.numerator <= bound:
        return RoundedDelta(delta, bound)
    if delta > bound:
        raise ValueError(f"no rational >= {delta} has numerator <= {bound}")
    P, Q = delta.numerator, delta.denominator
    ln, ld = 0, 1       # lo < delta
    hn, hd = 1, 0       # hi > delta (1/0 is +infinity)
    while True:
        mn, md = ln + hn, ld + hd
        if mn > bound:
            return RoundedDelta(Fraction(hn, hd), bound)
        if mn * Q > P * md:
            # mediant above delta: move hi towards lo k times
            k = (hn * Q - P * hd - 1) // (P * ld - Q * ln)
            if ln:
                k = min(k, (bound - hn) // ln)
            hn, hd = hn + k * ln, hd + k * ld
        else:
            k = (P * ld - Q * ln - 1) // (hn * Q - P * hd)
            k = min(k, (bound - ln) // hn)
            ln, ld = ln + k * hn, ld + k * hd


def lf(lam, x, delta) -> Fraction:
    """``frac(1/2 + lam + x*delta) - 1/2``: the offset, relative to the
    middle of its edge, of a point reached after travelling ``x*delta``."""
    t = HALF + Fraction(lam) + Fraction(x) * Fraction(delta)
    return t - math.floor(t) - HALF


# ---------------------------------------------------------------- pivots and G_S

def critical_pairs(apsp, points: Sequence[Point], delta) -> list[tuple[Point, Point]]:
    return [(p, q) for p, q in combinations(sorted(points), 2) if point_distance(apsp, p, q) == delta]


@dataclass(frozen=True)
class PivotRecord:
    pivot: Point
    witnesses: tuple[tuple[Point, Point], ...]


def find_pivots(g: Graph, apsp, points: Sequence[Point], delta) -> list[PivotRecord]:
    """Half-integral points at distance exactly ``delta/2`` from both members
    of some critical pair."""
    half = Fraction(delta) / 2
    crit = critical_pairs(apsp, points, delta)
    if not crit:
        return []
    out = []
    for r in half_integral_points(g):
        near = {p for p in points if point_distance(apsp, p, r) == half}
        wit = tuple((p, q) for p, q in crit if p in near and q in near)
        if wit:
            out.append(PivotRecord(r, wit))
    return sorted(out, key=lambda rec: rec.pivot)


@dataclass(frozen=True)
class AuxiliaryGraph:
    nodes: tuple[Point, ...]
    adj: dict                       # Point -> tuple of neighbouring Points
    pivots: frozenset
    delta: Fraction

    @property
    def edges(self) -> list[tuple[Point, Point]]:
        return sorted((p, q) for p in self.nodes for q in self.adj[p] if p < q)


def build_auxiliary_graph(g: Graph, apsp, points: Sequence[Point], delta, pivots=None) -> AuxiliaryGraph:
    if pivots is None:
        pivots = find_pivots(g, apsp, points, delta)
    adj: dict[Point, set] = {p: set() for p in points}
    witnessed = set()
    for rec in pivots:
        adj.setdefault(rec.pivot, set())
        for p, q in rec.witnesses:
            witnessed.add((p, q))
            for x in (p, q):
                adj[x].add(rec.pivot)
                adj[rec.pivot].add(x)
    for p, q in critical_pairs(apsp, points, delta):
        if (p, q) not in witnessed:
            adj[p].add(q)
            adj[q].add(p)
    nodes = tuple(sorted(adj))
    return AuxiliaryGraph(
        nodes,
        {p: tuple(sorted(adj[p])) for p in nodes},
        frozenset(rec.pivot for rec in pivots),
        Fraction(delta),
    )


# ---------------------------------------------------------------- movement plan

@dataclass(frozen=True)
class Move:
    vel: Fraction
    sgn: int
    anchor: int | None      # endpoint towards the spine predecessor; None for roots


@dataclass
class MovementPlan:
    roots: frozenset
    moves: dict                                  # Point -> Move
    parent: dict = field(default_factory=dict)   # Point -> spine predecessor

    def spine(self, p: Point) -> list[Point]:
        path = [p]
        while self.parent.get(path[-1]) is not None:
            path.append(self.parent[path[-1]])
        return path[::-1]

    def edge_rate(self, p: Point) -> Fraction:
        """Speed of ``p`` measured in its edge's canonical orientation."""
        mv = self.moves.get(p)
        if mv is None or mv.anchor is None or mv.vel == 0:
            return Fraction(0)
        speed = mv.sgn * mv.vel
        return speed if mv.anchor == p.u else -speed


def _components(aux: AuxiliaryGraph) -> list[list[Point]]:
    seen = set()
    out = []
    for s in aux.nodes:
        if s in seen:
            continue
        seen.add(s)
        comp = [s]
        stack = [s]
        while stack:
            for y in aux.adj[stack.pop()]:
                if y not in seen:
                    seen.add(y)
                    comp.append(y)
                    stack.append(y)
        out.append(comp)
    return out


def build_movement_plan(g: Graph, apsp, aux: AuxiliaryGraph) -> MovementPlan:
    """Assign every node of the auxiliary graph its signed speed.

    Roots (half-integral nodes, plus the smallest point of each component
    without one) stay put.  Walking away from a root, the first point moves at
    speed 1 (1/2 next to a pivot), and each further point adds or subtracts
    one unit depending on whether its predecessor was passed straight through.
    """
    roots = {x for x in aux.nodes if x.half_integral}
    for comp in _components(aux):
        if not any(x in roots for x in comp):
            roots.add(min(comp))
    moves = {r: Move(Fraction(0), 1, None) for r in roots}
    parent: dict = {r: None for r in roots}

    def extend(x: Point, y: Point) -> Move:
        anchor = direction(g, apsp, y, x)[0]
        if x in roots:
            vel = HALF if x in aux.pivots else Fraction(1)
            return Move(vel, 1, anchor)
        mx = moves[x]
        flip = 1 if mx.anchor != direction(g, apsp, x, y)[0] else -1
        sgn = flip * mx.sgn
        return Move(mx.vel + sgn, sgn, anchor)

    def ancestors(x):
        out = set()
        while x is not None:
            out.add(x)
            x = parent[x]
        return out

    queue = deque(sorted(roots))
    while queue:
        x = queue.popleft()
        for y in aux.adj[x]:
            if y in roots:
                continue
            cand = extend(x, y)
            if y not in moves:
                moves[y] = cand
                parent[y] = x
                queue.append(y)
            elif y not in ancestors(x):
                have = moves[y]
                same = have.vel == cand.vel and (
                    have.vel == 0 or (have.anchor == cand.anchor) == (have.sgn == cand.sgn)
                )
                if not same:
                    raise RoundingError(
                        f"movement plan conflict at {y}: {have} via {parent[y]} vs {cand} via {x}"
                    )
    return MovementPlan(frozenset(roots), moves, parent)


# ---------------------------------------------------------------- ε*

@dataclass(frozen=True)
class _Track:
    """A point moving linearly: position ``lam0 + rate*eps`` from ``u``."""

    u: int
    v: int | None
    lam0: Fraction
    rate: Fraction

    def at(self, eps) -> Point:
        if self.v is None:
            return Point(self.u)
        return on_edge(self.u, self.v, self.lam0 + self.rate * eps)


def _track(p: Point, rate) -> _Track:
    if p.v is None:
        return _Track(p.u, None, Fraction(0), Fraction(0))
    return _Track(p.u, p.v, p.lam, Fraction(rate))


def _routes(apsp, a: _Track, b: _Track) -> list[tuple]:
    """Linear functions ``c0 + c1*eps`` whose minimum is the distance."""
    if a.v is None and b.v is None:
        return [(apsp[a.u][b.u], 0)]
    if a.v is None:
        a, b = b, a
    if b.v is None:
        w = b.u
        out = [(apsp[w][a.u] + a.lam0, a.rate), (apsp[w][a.v] + 1 - a.lam0, -a.rate)]
    elif (a.u, a.v) == (b.u, b.v):
        s = 1 if a.lam0 > b.lam0 else -1
        out = [(s * (a.lam0 - b.lam0), s * (a.rate - b.rate))]
    else:
        out = []
        for xa, ca, ka in ((a.u, a.lam0, a.rate), (a.v, 1 - a.lam0, -a.rate)):
            for xb, cb, kb in ((b.u, b.lam0, b.rate), (b.v, 1 - b.lam0, -b.rate)):
                out.append((ca + apsp[xa][xb] + cb, ka + kb))
    return [r for r in out if r[0] != INF]


@dataclass(frozen=True)
class EpsilonResult:
    epsilon: Fraction
    events: frozenset        # subset of {1, 2, 3}
    reached_cap: bool


def _event_bound(tr: _Track) -> Fraction | None:
    """Time until a moving point becomes half-integral."""
    if tr.v is None or tr.rate == 0:
        return None
    if tr.rate > 0:
        target = HALF if tr.lam0 < HALF else Fraction(1)
        return (target - tr.lam0) / tr.rate
    target = HALF if tr.lam0 > HALF else Fraction(0)
    return (tr.lam0 - target) / -tr.rate


def compute_epsilon_star(g: Graph, apsp, points: Sequence[Point], plan: MovementPlan, delta, delta_star) -> EpsilonResult:
    delta, delta_star = Fraction(delta), Fraction(delta_star)
    cap = delta_star - delta
    if cap <= 0:
        return EpsilonResult(Fraction(0), frozenset(), True)
    pts = sorted(points)
    tracks = {p: _track(p, plan.edge_rate(p)) for p in pts}
    bound = cap
    for tr in tracks.values():
        t = _event_bound(tr)
        if t is not None and t < bound:
            bound = t

    pair_routes = {}
    cand1 = set()
    for p, q in combinations(pts, 2):
        routes = _routes(apsp, tracks[p], tracks[q])
        pair_routes[(p, q)] = routes
        if min((c0 for c0, _ in routes), default=INF) == delta:
            continue
        for c0, c1 in routes:
            if c1 < 1:
                t = (c0 - delta) / (1 - c1)
                if 0 < t <= bound:
                    cand1.add(t)

    pivots = {rec.pivot for rec in find_pivots(g, apsp, pts, delta)}
    others = [r for r in half_integral_points(g) if r not in pivots]
    cand3 = set()
    for r in others:
        rt = _track(r, 0)
        for p in pts:
            for c0, c1 in _routes(apsp, rt, tracks[p]):
                if c1 != HALF:
                    t = (c0 - delta / 2) / (HALF - c1)
                    if 0 < t <= bound:
                        cand3.add(t)

    def dist_at(p, q, eps):
        return min(c0 + c1 * eps for c0, c1 in pair_routes[(p, q)]) if pair_routes[(p, q)] else INF

    def event1(eps):
        return any(
            min((c0 for c0, _ in routes), default=INF) != delta and dist_at(p, q, eps) == delta + eps
            for (p, q), routes in pair_routes.items()
        )

    def event3(eps):
        moved = [tracks[p].at(eps) for p in pts]
        half = (delta + eps) / 2
        for r in others:
            if sum(1 for x in moved if point_distance(apsp, x, r) == half) >= 2:
                return True
        return False

    eps = bound
    for t in sorted(cand1):
        if t >= eps:
            break
        if event1(t):
            eps = t
            break
    for t in sorted(cand3):
        if t >= eps:
            break
        if event3(t):
            eps = t
            break
    if eps <= 0:
        raise RoundingError("no progress possible: epsilon* = 0 below delta*")

    fired = set()
    if event1(eps):
        fired.add(1)
    if any(not p.half_integral and tracks[p].at(eps).half_integral for p in pts):
        fired.add(2)
    if event3(eps):
        fired.add(3)
    reached = eps == cap
    if not fired and not reached:
        raise RoundingError(f"epsilon* = {eps} but no event fires")
    return EpsilonResult(eps, frozenset(fired), reached)


def push_step(g: Graph, points: Sequence[Point], plan: MovementPlan, epsilon) -> list[Point]:
    """Move every point by ``epsilon`` times its signed speed."""
    eps = Fraction(epsilon)
    return [_track(p, plan.edge_rate(p)).at(eps) for p in points]


# ---------------------------------------------------------------- driver

@dataclass(frozen=True)
class Potential:
    uncritical_pairs: int
    non_half_integral: int
    non_pivot_half_integral: int

    @property
    def total(self) -> int:
        return self.uncritical_pairs + self.non_half_integral + self.non_pivot_half_integral


def potential(g: Graph, apsp, points: Sequence[Point], delta) -> Potential:
    pairs = len(points) * (len(points) - 1) // 2
    return Potential(
        pairs - len(critical_pairs(apsp, points, delta)),
        sum(1 for p in points if not p.half_integral),
        g.n + g.m - len(find_pivots(g, apsp, points, delta)),
    )


@dataclass(frozen=True)
class RoundStep:
    delta: Fraction
    epsilon: Fraction
    events: frozenset
    before: Potential
    after: Potential


@dataclass
class RoundTrace:
    delta: Fraction
    delta_star: Fraction
    steps: list = field(default_factory=list)


def round_set(
    g: Graph,
    points: Sequence[Point],
    delta,
    L: int,
    *,
    apsp=None,
    check: bool = True,
    on_step: Callable | None = None,
) -> tuple[list[Point], RoundTrace]:
    """Push a ``delta``-dispersed set until it is ``delta*``-dispersed.

    With ``check`` every step re-verifies that the set stays dispersed, that
    critical pairs and pivots survive, that the potential drops and that all
    speeds stay below ``b/2``.  ``on_step(points, plan, delta, epsilon, new)``
    is called after every step.
    """
    apsp = apsp or all_pairs_distances(g)
    delta = Fraction(delta)
    pts = sorted(points)
    ok = validate_dispersed(g, pts, delta, apsp)
    if not ok:
        raise ValueError(f"input is not {delta}-dispersed: {ok.detail}")
    if len(pts) <= 1 and delta > 2 * L + 2:
        return pts, RoundTrace(delta, delta)
    target = round_up_delta(delta, L).delta_star
    if len(pts) <= 1:
        return pts, RoundTrace(delta, target)
    trace = RoundTrace(delta, target)
    budget = 2 * len(pts) ** 2 + g.n ** 2
    while delta < target:
        if len(trace.steps) >= budget:
            raise RoundingError(f"step budget {budget} exhausted")
        pivots = find_pivots(g, apsp, pts, delta)
        aux = build_auxiliary_graph(g, apsp, pts, delta, pivots)
        plan = build_movement_plan(g, apsp, aux)
        res = compute_epsilon_star(g, apsp, pts, plan, delta, target)
        new = push_step(g, pts, plan, res.epsilon)
        new_delta = delta + res.epsilon
        before = potential(g, apsp, pts, delta) if check else None
        after = None
        if check:
            after = _check_step(g, apsp, pts, new, plan, pivots, delta, new_delta, target, before)
        if on_step is not None:
            on_step(pts, plan, delta, res.epsilon, new)
        trace.steps.append(RoundStep(delta, res.epsilon, res.events, before, after))
        pts = sorted(new)
        delta = new_delta
    return pts, trace


def _check_step(g, apsp, old, new, plan, pivots, delta, new_delta, target, before) -> Potential:
    if len(set(new)) != len(old):
        raise RoundingError("points merged during a push")
    ok = validate_dispersed(g, new, new_delta, apsp)
    if not ok:
        raise RoundingError(f"push broke dispersion: {ok.detail}")
    b = delta.denominator
    for p, mv in plan.moves.items():
        if abs(mv.vel) * 2 >= b:
            raise RoundingError(f"speed {mv.vel} of {p} not below {b}/2")
    moved = dict(zip(old, new))
    for p, q in critical_pairs(apsp, old, delta):
        if point_distance(apsp, moved[p], moved[q]) != new_delta:
            raise RoundingError(f"critical pair {p}, {q} lost criticality")
    new_pivots = {rec.pivot for rec in find_pivots(g, apsp, new, new_delta)}
    for rec in pivots:
        if rec.pivot not in new_pivots:
            raise RoundingError(f"pivot {rec.pivot} lost")
    after = potential(g, apsp, new, new_delta)
    if new_delta < target and not after.total < before.total:
        raise RoundingError(f"potential did not drop: {before} -> {after}")
    return after
