"""Maximum δ-dispersed sets.

The exact pipeline rounds δ up to δ* = a/b (same optimum, small numerator),
shrinks it into (3/4, 3] by the one-point-per-edge correspondence, then
solves a distance-2a independent set problem on the 2b-subdivision by
dynamic programming over a tree decomposition.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .brute import SizeGuardError, brute_force_dis, brute_force_dispersion
from .dp import BudgetError, dis_dp, state_estimate
from .graph import Graph, TreeDecomposition, greedy_maximal_matching, longest_path_bound, subdivide, tree_decomposition
from .metric import Point, midpoint, on_edge, validate_dispersed, vertex
from .rounding import round_up_delta
from .translate import delta_descend_count, translate_up

__all__ = [
    "Decision",
    "ResourceError",
    "SolveOptions",
    "SolveReport",
    "brute_force_dis",
    "brute_force_dispersion",
    "decide_dispersion",
    "dis_dp",
    "solve_max_dispersion",
]

DEFAULT_BUDGET = 10 ** 8


class ResourceError(RuntimeError):
    """The instance exceeds a configured resource guard."""


def default_budget() -> int:
    raw = os.environ.get("DISPERSOL_BUDGET")
    return int(float(raw)) if raw else DEFAULT_BUDGET


@dataclass(frozen=True)
class SolveOptions:
    method: str = "auto"                 # auto | dp | brute
    L: int | None = None                 # trusted bound on the longest path
    td: TreeDecomposition | None = None  # decomposition of the subdivided graph
    budget: int | None = None            # DP state budget (default: env or 1e8)
    brute_limit: int = 60                # auto: exhaustive search up to this many grid points
    fast_dp: int = 10 ** 6               # auto: prefer DP below this state estimate
    brute_fallback_limit: int = 400      # auto: otherwise exhaustive search up to this size


@dataclass
class SolveReport:
    delta: Fraction
    delta_star: Fraction
    optimum: int
    witness: list
    method: str
    descend_steps: int = 0
    extra: int = 0
    subdivision: int | None = None
    d: int | None = None
    width: int | None = None
    timings: dict = field(default_factory=dict)


def _from_subdivision(paths, c: int, chosen) -> list[Point]:
    where = {}
    for (u, v), seq in paths.items():
        for j, x in enumerate(seq):
            where.setdefault(x, on_edge(u, v, Fraction(j, c)))
    return sorted(where[x] if x in where else vertex(x) for x in chosen)


def _brute(g: Graph, delta: Fraction, limit: int) -> list[Point]:
    try:
        return brute_force_dispersion(g, delta, max_points=limit)[1]
    except SizeGuardError as exc:
        raise ResourceError(str(exc)) from None


def _dp_cost(g: Graph, star: Fraction, td) -> int:
    small, _ = delta_descend_count(star, g.m)
    sub, _ = subdivide(g, 2 * small.denominator)
    return state_estimate(2 * small.numerator, tree_decomposition(sub, td).width)


def _pipeline(g: Graph, delta: Fraction, opts: SolveOptions, report: SolveReport) -> list[Point]:
    small, extra = delta_descend_count(report.delta_star, g.m)
    steps = extra // g.m if g.m else 0
    a, b = small.numerator, small.denominator
    report.descend_steps, report.extra = steps, extra
    c, d = 2 * b, 2 * a
    report.subdivision, report.d = c, d
    sub, paths = subdivide(g, c)
    t = time.perf_counter()
    nice = tree_decomposition(sub, opts.td)
    report.width = nice.width
    budget = opts.budget if opts.budget is not None else default_budget()
    if state_estimate(d, nice.width) > budget:
        raise ResourceError(
            f"DP on the {c}-subdivision (width {nice.width}, d={d}) needs about "
            f"{state_estimate(d, nice.width):.3g} states, over the budget {budget:.3g}; "
            "supply a better decomposition, raise DISPERSOL_BUDGET, or use --method brute"
        )
    try:
        _, chosen = dis_dp(sub, d, nice, budget=budget)
    except BudgetError as exc:
        raise ResourceError(str(exc)) from None
    report.timings["dp"] = time.perf_counter() - t
    pts = _from_subdivision(paths, c, chosen)
    cur = small
    for _ in range(steps):
        pts, _ = translate_up(g, pts, cur)
        cur = cur / (cur + 1)
    return pts


def solve_max_dispersion(g: Graph, delta, options: SolveOptions | None = None) -> SolveReport:
    """Maximum size of a ``delta``-dispersed point set of ``g``, with a witness."""
    opts = options or SolveOptions()
    delta = Fraction(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    if opts.method not in ("auto", "dp", "brute"):
        raise ValueError(f"unknown method {opts.method!r}")
    t0 = time.perf_counter()
    L = longest_path_bound(g, opts.L)
    try:
        star = round_up_delta(delta, L).delta_star
    except ValueError:
        # beyond 2L+2 no two points of one component fit: distances there are at most L+1
        pts = [vertex(c[0]) for c in g.components()]
        return SolveReport(delta, delta, len(pts), pts, "shortcut", timings={"total": time.perf_counter() - t0})
    report = SolveReport(delta, star, 0, [], opts.method)
    grid = g.n + g.m * (2 * delta.denominator - 1)
    if opts.method == "brute":
        pts = _brute(g, delta, grid)
    elif opts.method == "dp":
        pts = _pipeline(g, delta, opts, report)
    elif grid <= opts.brute_limit:
        pts = _brute(g, delta, opts.brute_limit)
    elif _dp_cost(g, star, opts.td) <= opts.fast_dp or grid > opts.brute_fallback_limit:
        try:
            pts = _pipeline(g, delta, opts, report)
        except ResourceError as exc:
            if grid > opts.brute_fallback_limit:
                raise
            report.d = None
            try:
                pts = _brute(g, delta, opts.brute_fallback_limit)
            except ResourceError:
                raise exc from None
    else:
        # large DP tables come with large δ or dense graphs, where the
        # conflict graph is dense and branch and bound finishes quickly
        pts = _brute(g, delta, opts.brute_fallback_limit)
    report.method = "pipeline" if report.d is not None else "bruteforce"
    ok = validate_dispersed(g, pts, delta)
    if not ok:
        raise RuntimeError(f"internal error: witness is not dispersed ({ok.detail})")
    report.witness = pts
    report.optimum = len(pts)
    report.timings["total"] = time.perf_counter() - t0
    return report


@dataclass
class Decision:
    answer: bool
    method: str
    certificate: list
    optimum: int | None = None


def decide_dispersion(g: Graph, delta, k: int, options: SolveOptions | None = None) -> Decision:
    """Is there a ``delta``-dispersed set of ``k`` points?"""
    delta = Fraction(delta)
    if k <= 0:
        return Decision(True, "trivial", [])
    if k == 1 and g.n:
        return Decision(True, "trivial", [vertex(0)])
    if delta <= 2:
        match = greedy_maximal_matching(g)
        if k <= match.size:
            cert = [midpoint(u, v) for u, v in match.matched_edges[:k]]
            return Decision(True, "shortcut", sorted(cert))
    rep = solve_max_dispersion(g, delta, options)
    return Decision(rep.optimum >= k, rep.method, rep.witness[:k] if rep.optimum >= k else rep.witness, rep.optimum)
