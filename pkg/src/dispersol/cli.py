"""Command-line interface.

Exit codes: 0 success (or "yes"), 1 "no" / verification failure,
2 input error, 3 resource guard hit.
"""

from __future__ import annotations

import json
import random
import sys
from fractions import Fraction
from pathlib import Path

import click

from . import __version__
from .brute import SizeGuardError, brute_force_dis, brute_force_dispersion
from .gadgets import McisInstance, gen_chordal_gadget, gen_is_gadget, gen_mcis_gadget, gen_sat_to_mcis, parse_dimacs
from .graph import Graph, GraphError, DecompositionError, format_graph, load_graph, longest_path_bound, parse_td
from .metric import Point, fmt_rat, format_points, parse_points, parse_rat, validate_auto_dispersed, validate_dispersed
from .rounding import RoundingError, round_set
from .solver import ResourceError, SolveOptions, decide_dispersion, solve_max_dispersion
from .translate import TranslationError, translate_down, translate_up

SCHEMA = 1

EXIT_OK, EXIT_NO, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3


class InputError(click.ClickException):
    exit_code = EXIT_INPUT


# ---------------------------------------------------------------- rendering

def point_json(p: Point) -> dict:
    if p.v is None:
        return {"vertex": p.u}
    return {"edge": [p.u, p.v], "lam": fmt_rat(p.lam)}


def export_dot(g: Graph, points=()) -> str:
    """DOT rendering of ``g`` with the points of ``points`` marked.

    Vertex points fill their vertex; interior points become small nodes that
    split their edge, labelled with the position measured from the lower end.
    """
    pts = sorted(points)
    at_vertex = {p.u for p in pts if p.v is None}
    on: dict[tuple[int, int], list[Point]] = {}
    for p in pts:
        if p.v is not None:
            on.setdefault((p.u, p.v), []).append(p)
    out = ["graph G {", "  node [shape=circle];"]
    for v in range(g.n):
        extra = ', style=filled, fillcolor="#f4a259", xlabel="0"' if v in at_vertex else ""
        out.append(f'  {v} [label="{v}"{extra}];')
    k = 0
    for u, v in g.edges:
        chain = on.get((u, v), [])
        if not chain:
            out.append(f"  {u} -- {v} [len=1];")
            continue
        prev, prev_lam = str(u), Fraction(0)
        for p in chain:
            name = f"p{k}"
            k += 1
            out.append(f'  {name} [shape=point, width=0.12, color="#bc4b51", xlabel="{fmt_rat(p.lam)}"];')
            out.append(f"  {prev} -- {name} [len={float(p.lam - prev_lam):.6g}];")
            prev, prev_lam = name, p.lam
        out.append(f"  {prev} -- {v} [len={float(1 - prev_lam):.6g}];")
    out.append("}")
    return "\n".join(out) + "\n"


def _emit(payload: dict, as_json: bool, out: str | None, text: str) -> None:
    payload = {"schema": SCHEMA, **payload}
    if out:
        Path(out).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    if as_json:
        click.echo(json.dumps(payload, indent=2, sort_keys=True))
    else:
        click.echo(text)


# ---------------------------------------------------------------- input

def _graph(path: str, allow_disconnected: bool = False) -> Graph:
    try:
        return load_graph(path, allow_disconnected=allow_disconnected)
    except GraphError as exc:
        raise InputError(f"{path}: {exc}") from None


def _delta(text: str) -> Fraction:
    try:
        d = parse_rat(text)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if d <= 0:
        raise InputError("delta must be positive")
    return d


def _points(path: str, g: Graph) -> list[Point]:
    try:
        return parse_points(Path(path).read_text(), g)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


graph_opt = click.option("--graph", "graph_path", required=True, type=click.Path(exists=True, dir_okay=False), help="Edge-list graph file.")
delta_opt = click.option("--delta", "delta_text", required=True, help="Distance as a/b or an integer.")
json_opt = click.option("--json", "as_json", is_flag=True, help="Print the JSON report.")
out_opt = click.option("--out", "out", type=click.Path(dir_okay=False), help="Also write the JSON report here.")
disc_opt = click.option("--allow-disconnected", is_flag=True, help="Accept disconnected graphs (gadget output).")


@click.group()
@click.version_option(__version__)
def main():
    """Exact maximum δ-dispersion on unit-edge graphs."""


def _options(method, L, td_path, budget, g) -> SolveOptions:
    td = None
    if td_path:
        try:
            td = parse_td(Path(td_path).read_text())
        except (DecompositionError, ValueError) as exc:
            raise InputError(f"{td_path}: {exc}") from None
    return SolveOptions(method=method, L=L, td=td, budget=budget)


def _solve_common(f):
    f = click.option("--method", type=click.Choice(["auto", "dp", "brute"]), default="auto", show_default=True)(f)
    f = click.option("--L", "L", type=click.IntRange(min=0), help="Trusted bound on the longest path length.")(f)
    f = click.option("--td", "td_path", type=click.Path(exists=True, dir_okay=False), help="PACE tree decomposition of the subdivided graph.")(f)
    f = click.option("--budget", type=click.IntRange(min=1), help="DP state budget (default: DISPERSOL_BUDGET or 1e8).")(f)
    f = click.option("--threads", type=click.IntRange(min=1), default=1, help="Worker threads (the solver currently runs single-threaded).")(f)
    return f


@main.command()
@graph_opt
@delta_opt
@click.option("--k", type=click.IntRange(min=0), help="Also answer whether k points fit (exit 1 if not).")
@_solve_common
@click.option("--points-out", type=click.Path(dir_okay=False), help="Write the witness as a point file.")
@click.option("--dot", type=click.Path(dir_okay=False), help="Write the witness over the graph as DOT.")
@json_opt
@out_opt
@disc_opt
def solve(graph_path, delta_text, k, method, L, td_path, budget, threads, points_out, dot, as_json, out, allow_disconnected):
    """Maximum size of a δ-dispersed set, with a witness."""
    g = _graph(graph_path, allow_disconnected)
    delta = _delta(delta_text)
    try:
        rep = solve_max_dispersion(g, delta, _options(method, L, td_path, budget, g))
    except DecompositionError as exc:
        raise InputError(f"tree decomposition: {exc}") from None
    except ResourceError as exc:
        click.echo(f"resource limit: {exc}", err=True)
        sys.exit(EXIT_RESOURCE)
    if points_out:
        Path(points_out).write_text(format_points(rep.witness))
    if dot:
        Path(dot).write_text(export_dot(g, rep.witness))
    payload = {
        "command": "solve",
        "delta": fmt_rat(rep.delta),
        "delta_star": fmt_rat(rep.delta_star),
        "optimum": rep.optimum,
        "witness": [point_json(p) for p in rep.witness],
        "method": rep.method,
        "descend_steps": rep.descend_steps,
        "extra_points": rep.extra,
        "subdivision": rep.subdivision,
        "d": rep.d,
        "width": rep.width,
    }
    if k is not None:
        payload["k"] = k
        payload["answer"] = rep.optimum >= k
    _emit(payload, as_json, out, f"optimum {rep.optimum} (delta {fmt_rat(delta)}, delta* {fmt_rat(rep.delta_star)}, {rep.method})")
    if k is not None and rep.optimum < k:
        sys.exit(EXIT_NO)


@main.command()
@graph_opt
@delta_opt
@click.option("--k", type=click.IntRange(min=0), required=True)
@_solve_common
@json_opt
@out_opt
@disc_opt
def decide(graph_path, delta_text, k, method, L, td_path, budget, threads, as_json, out, allow_disconnected):
    """Is there a δ-dispersed set of k points?  Exit 0 for yes, 1 for no."""
    g = _graph(graph_path, allow_disconnected)
    delta = _delta(delta_text)
    try:
        res = decide_dispersion(g, delta, k, _options(method, L, td_path, budget, g))
    except DecompositionError as exc:
        raise InputError(f"tree decomposition: {exc}") from None
    except ResourceError as exc:
        click.echo(f"resource limit: {exc}", err=True)
        sys.exit(EXIT_RESOURCE)
    payload = {
        "command": "decide",
        "delta": fmt_rat(delta),
        "k": k,
        "answer": res.answer,
        "method": res.method,
        "certificate": [point_json(p) for p in res.certificate],
        "optimum": res.optimum,
    }
    _emit(payload, as_json, out, f"{'yes' if res.answer else 'no'} ({res.method})")
    sys.exit(EXIT_OK if res.answer else EXIT_NO)


@main.command()
@graph_opt
@delta_opt
@click.option("--points", "points_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--auto", "auto", is_flag=True, help="Check auto-dispersion (the A1/A2 conditions) as well.")
@json_opt
@out_opt
@disc_opt
def verify(graph_path, delta_text, points_path, auto, as_json, out, allow_disconnected):
    """Check that a point set is δ-dispersed.  Exit 1 on a violation."""
    g = _graph(graph_path, allow_disconnected)
    delta = _delta(delta_text)
    pts = _points(points_path, g)
    res = validate_auto_dispersed(g, pts, delta) if auto else validate_dispersed(g, pts, delta)
    payload = {"command": "verify", "delta": fmt_rat(delta), "size": len(pts), "ok": bool(res)}
    if not res:
        payload["violation"] = {
            "kind": res.kind,
            "detail": res.detail,
            "items": [point_json(x) if isinstance(x, Point) else x for x in res.items],
        }
    _emit(payload, as_json, out, "ok" if res else f"violation: {res.detail}")
    sys.exit(EXIT_OK if res else EXIT_NO)


def _potential_json(p):
    if p is None:
        return None
    return {"uncritical_pairs": p.uncritical_pairs, "non_half_integral": p.non_half_integral,
            "non_pivot_half_integral": p.non_pivot_half_integral, "total": p.total}


@main.command(name="round")
@graph_opt
@delta_opt
@click.option("--points", "points_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--L", "L", type=click.IntRange(min=0), help="Trusted bound on the longest path length.")
@click.option("--points-out", type=click.Path(dir_okay=False), help="Write the rounded set here.")
@click.option("--trace", "trace_path", type=click.Path(dir_okay=False), help="Write the step trace as JSON.")
@click.option("--no-check", is_flag=True, help="Skip the per-step invariant checks.")
@json_opt
@out_opt
def round_cmd(graph_path, delta_text, points_path, L, points_out, trace_path, no_check, as_json, out):
    """Push a δ-dispersed set to δ* without losing points."""
    g = _graph(graph_path)
    delta = _delta(delta_text)
    pts = _points(points_path, g)
    L = longest_path_bound(g, L)
    try:
        new, trace = round_set(g, pts, delta, L, check=not no_check)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    except RoundingError as exc:
        click.echo(f"rounding failed: {exc}", err=True)
        sys.exit(EXIT_RESOURCE)
    steps = [
        {
            "delta": fmt_rat(s.delta),
            "epsilon": fmt_rat(s.epsilon),
            "events": sorted(s.events),
            "potential_before": _potential_json(s.before),
            "potential_after": _potential_json(s.after),
        }
        for s in trace.steps
    ]
    if trace_path:
        Path(trace_path).write_text(json.dumps({"schema": SCHEMA, "steps": steps}, indent=2) + "\n")
    if points_out:
        Path(points_out).write_text(format_points(new))
    payload = {
        "command": "round",
        "delta": fmt_rat(delta),
        "delta_star": fmt_rat(trace.delta_star),
        "L": L,
        "points": [point_json(p) for p in new],
        "steps": steps,
    }
    _emit(payload, as_json, out, f"delta* {fmt_rat(trace.delta_star)} after {len(steps)} step(s)\n" + format_points(new).rstrip())


@main.command()
@click.argument("direction", type=click.Choice(["up", "down"]))
@graph_opt
@delta_opt
@click.option("--points", "points_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--points-out", type=click.Path(dir_okay=False))
@click.option("--cert", "cert_path", type=click.Path(dir_okay=False), help="Write the certificate as JSON.")
@json_opt
@out_opt
def translate(direction, graph_path, delta_text, points_path, points_out, cert_path, as_json, out):
    """Map a δ-auto-dispersed set to δ/(δ+1) (up) or back (down, δ < 1 given)."""
    g = _graph(graph_path)
    delta = _delta(delta_text)
    pts = _points(points_path, g)
    try:
        new, cert = translate_up(g, pts, delta) if direction == "up" else translate_down(g, pts, delta)
    except TranslationError as exc:
        raise InputError(str(exc)) from None
    cert_json = {
        "direction": cert.direction,
        "delta_in": fmt_rat(cert.delta_in),
        "delta_out": fmt_rat(cert.delta_out),
        "rho": fmt_rat(cert.rho),
        "size_in": cert.size_in,
        "size_out": cert.size_out,
        "per_edge": [[u, v, a, b] for (u, v), (a, b) in sorted(cert.per_edge.items())],
        "empty_edges": [[u, v, w] for (u, v), w in sorted(cert.empty_edges.items())],
    }
    if cert_path:
        Path(cert_path).write_text(json.dumps({"schema": SCHEMA, **cert_json}, indent=2) + "\n")
    if points_out:
        Path(points_out).write_text(format_points(new))
    payload = {"command": "translate", "certificate": cert_json, "points": [point_json(p) for p in new]}
    _emit(payload, as_json, out, f"{len(pts)} -> {len(new)} points at delta {fmt_rat(cert.delta_out)}\n" + format_points(new).rstrip())


@main.command()
@click.argument("kind", type=click.Choice(["is", "chordal", "mcis", "sat"]))
@click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Source graph (is, chordal), JSON MCIS instance (mcis) or DIMACS CNF (sat).")
@click.option("--delta", "delta_text", help="Gadget distance (is: in (2,3], chordal: > 3).")
@click.option("--out", "out", required=True, type=click.Path(dir_okay=False), help="Gadget graph file.")
@click.option("--provenance", "prov_path", type=click.Path(dir_okay=False), help="Provenance JSON (default: <out>.json).")
def gen(kind, in_path, delta_text, out, prov_path):
    """Generate a hardness gadget as a graph file plus provenance JSON."""
    text = Path(in_path).read_text()
    try:
        if kind in ("is", "chordal"):
            if not delta_text:
                raise InputError(f"gen {kind} needs --delta")
            src = _graph(in_path)
            fn = gen_is_gadget if kind == "is" else gen_chordal_gadget
            inst = fn(src, _delta(delta_text))
            extra = {}
        else:
            if kind == "mcis":
                raw = json.loads(text)
                mg = Graph(raw["n"], [tuple(e) for e in raw["edges"]], allow_disconnected=True)
                m = McisInstance(mg, raw["classes"])
            else:
                nvars, clauses = parse_dimacs(text)
                m = gen_sat_to_mcis(nvars, clauses)
            inst = gen_mcis_gadget(m)
            extra = {"color_classes": [list(c) for c in m.color_classes], "mcis_labels": {str(k): v for k, v in m.labels.items()}}
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"{in_path}: {exc}") from None
    Path(out).write_text(format_graph(inst.graph))
    prov = {
        "schema": SCHEMA,
        "kind": kind,
        "delta": fmt_rat(inst.delta),
        "k": inst.k,
        "connected": inst.graph.is_connected(),
        "provenance": {str(v): lab for v, lab in sorted(inst.provenance.items())},
        **extra,
    }
    Path(prov_path or out + ".json").write_text(json.dumps(prov, indent=2) + "\n")
    click.echo(f"wrote {out}: n={inst.graph.n} m={inst.graph.m} delta={fmt_rat(inst.delta)}")


@main.group()
def oracle():
    """Exhaustive reference solvers."""


@oracle.command(name="dispersion")
@graph_opt
@delta_opt
@click.option("--max-points", type=click.IntRange(min=1), default=200, show_default=True)
@json_opt
@disc_opt
def oracle_dispersion(graph_path, delta_text, max_points, as_json, allow_disconnected):
    """Maximum δ-dispersed set by search over the 1/(2b) grid."""
    g = _graph(graph_path, allow_disconnected)
    delta = _delta(delta_text)
    try:
        count, pts = brute_force_dispersion(g, delta, max_points=max_points)
    except SizeGuardError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_RESOURCE)
    payload = {"command": "oracle dispersion", "delta": fmt_rat(delta), "optimum": count, "witness": [point_json(p) for p in pts]}
    _emit(payload, as_json, None, f"optimum {count}")


@oracle.command(name="dis")
@graph_opt
@click.option("--d", "d", type=click.IntRange(min=1), required=True)
@click.option("--max-vertices", type=click.IntRange(min=1), default=40, show_default=True)
@json_opt
@disc_opt
def oracle_dis(graph_path, d, max_vertices, as_json, allow_disconnected):
    """Largest vertex set with pairwise distance at least d."""
    g = _graph(graph_path, allow_disconnected)
    try:
        count, vs = brute_force_dis(g, d, max_vertices=max_vertices)
    except SizeGuardError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_RESOURCE)
    _emit({"command": "oracle dis", "d": d, "optimum": count, "vertices": vs}, as_json, None, f"optimum {count}")


@oracle.command(name="suite")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--count", type=click.IntRange(min=1), default=20, show_default=True)
@click.option("--max-n", type=click.IntRange(min=2), default=7, show_default=True)
@json_opt
def oracle_suite(seed, count, max_n, as_json):
    """Compare the exact pipeline with the grid oracle on random graphs."""
    rng = random.Random(seed)
    rows, bad = [], 0
    for _ in range(count):
        g = random_connected_graph(rng, rng.randint(2, max_n), max_edges=9)
        delta = Fraction(rng.randint(1, 5), rng.randint(1, 4))
        got = solve_max_dispersion(g, delta, SolveOptions(method="dp")).optimum
        want = brute_force_dispersion(g, delta, max_points=10 ** 4)[0]
        bad += got != want
        rows.append({"graph": format_graph(g), "delta": fmt_rat(delta), "pipeline": got, "oracle": want})
    _emit({"command": "oracle suite", "seed": seed, "cases": rows, "mismatches": bad}, as_json, None,
          f"{count} cases, {bad} mismatches")
    sys.exit(EXIT_OK if bad == 0 else EXIT_NO)


def random_connected_graph(rng: random.Random, n: int, max_edges: int | None = None) -> Graph:
    """Random spanning tree plus extra random edges."""
    edges = {(min(i, j), max(i, j)) for i in range(1, n) for j in [rng.randrange(i)]}
    cap = n * (n - 1) // 2 if max_edges is None else min(max_edges, n * (n - 1) // 2)
    target = rng.randint(len(edges), max(len(edges), cap))
    while len(edges) < target:
        u, v = rng.sample(range(n), 2)
        edges.add((min(u, v), max(u, v)))
    return Graph(n, sorted(edges))


if __name__ == "__main__":  # pragma: no cover
    main()
