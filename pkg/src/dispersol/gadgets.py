"""Generators for hardness gadgets, used as a cross-checking corpus.

Each generator returns a dispersion instance whose optimum is tied to a
classical quantity of the source (independence number, existence of a
multicolored independent set, satisfiability), together with a map from
gadget vertices to readable labels of the part they came from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .graph import Graph

__all__ = [
    "GadgetInstance",
    "McisInstance",
    "gen_chordal_gadget",
    "gen_is_gadget",
    "gen_mcis_gadget",
    "gen_sat_to_mcis",
    "has_mcis",
    "is_satisfiable",
    "parse_dimacs",
]


@dataclass
class GadgetInstance:
    graph: Graph
    delta: Fraction
    k: int | None
    provenance: dict[int, str] = field(default_factory=dict)


@dataclass
class McisInstance:
    graph: Graph
    color_classes: tuple[tuple[int, ...], ...]
    labels: dict[int, str] = field(default_factory=dict)

    def __post_init__(self):
        self.color_classes = tuple(tuple(c) for c in self.color_classes)
        seen = sorted(v for c in self.color_classes for v in c)
        if seen != list(range(self.graph.n)):
            raise ValueError("color classes must partition the vertex set")
        if len({len(c) for c in self.color_classes}) > 1:
            raise ValueError("color classes must have equal size")
        for c in self.color_classes:
            members = set(c)
            for v in c:
                if members.intersection(self.graph.adj[v]):
                    raise ValueError(f"color class containing {v} is not independent")

    @property
    def k(self) -> int:
        return len(self.color_classes)

    @property
    def class_size(self) -> int:
        return len(self.color_classes[0]) if self.color_classes else 0


class _Builder:
    def __init__(self):
        self.labels: list[str] = []
        self.edges: list[tuple[int, int]] = []

    def add(self, label: str) -> int:
        self.labels.append(label)
        return len(self.labels) - 1

    def path(self, s: int, t: int, length: int, label: str) -> None:
        """Join ``s`` and ``t`` by a path with ``length`` edges."""
        if length < 1:
            raise ValueError("path length must be positive")
        prev = s
        for i in range(1, length):
            x = self.add(f"{label}#{i}")
            self.edges.append((prev, x))
            prev = x
        self.edges.append((prev, t))

    def build(self, *, allow_disconnected=False) -> tuple[Graph, dict[int, str]]:
        g = Graph(len(self.labels), self.edges, allow_disconnected=allow_disconnected)
        return g, dict(enumerate(self.labels))


def gen_is_gadget(g: Graph, delta, k: int | None = None) -> GadgetInstance:
    """Each vertex becomes an edge ``u1-u2``; each source edge becomes the four
    edges between the endpoint pairs.  For δ in (2, 3] the optimum is α(g)."""
    delta = Fraction(delta)
    if not 2 < delta <= 3:
        raise ValueError("the independent-set gadget needs 2 < delta <= 3")
    edges = [(2 * u, 2 * u + 1) for u in range(g.n)]
    for u, v in g.edges:
        edges += [(2 * u + i, 2 * v + j) for i in (0, 1) for j in (0, 1)]
    prov = {}
    for u in range(g.n):
        prov[2 * u], prov[2 * u + 1] = f"{u}_1", f"{u}_2"
    return GadgetInstance(Graph(2 * g.n, edges), delta, k, prov)


def gen_chordal_gadget(g: Graph, delta, k: int | None = None) -> GadgetInstance:
    """Chordal gadget for δ > 3: a clique on the source edges, one hub per
    source vertex attached to its edges, and a tail of length ⌈δ/2⌉-2 ending
    in ``u1`` (plus a true twin ``u2`` when ⌈δ⌉ is even)."""
    delta = Fraction(delta)
    if delta <= 3:
        raise ValueError("the chordal gadget needs delta > 3")
    b = _Builder()
    w = {e: b.add(f"w{{{e[0]},{e[1]}}}") for e in g.edges}
    ws = list(w.values())
    b.edges += [(x, y) for i, x in enumerate(ws) for y in ws[i + 1:]]
    tail = math.ceil(delta / 2) - 2
    twin = math.ceil(delta) % 2 == 0
    for u in range(g.n):
        hub = b.add(f"{u}'")
        b.edges += [(hub, w[(min(u, v), max(u, v))]) for v in g.adj[u]]
        end = hub
        if tail:
            end = b.add(f"{u}_1")
            b.path(hub, end, tail, f"tail[{u}]")
        else:
            b.labels[hub] = f"{u}'={u}_1"
        if twin:
            t = b.add(f"{u}_2")
            nbrs = {y for x, y in b.edges if x == end} | {x for x, y in b.edges if y == end}
            b.edges += [(t, end)] + [(t, x) for x in sorted(nbrs)]
    graph, prov = b.build()
    return GadgetInstance(graph, delta, k, prov)


def gen_mcis_gadget(inst: McisInstance) -> GadgetInstance:
    """Dispersion instance at δ = 6n asking for k² points, where ``n`` is the
    class size and ``k`` the number of classes."""
    k, n = inst.k, inst.class_size
    if k < 1 or n < 1:
        raise ValueError("need at least one non-empty color class")
    b = _Builder()
    a = [b.add(f"a_{i + 1}") for i in range(k)]
    bb = [b.add(f"b_{i + 1}") for i in range(k)]
    index = {}
    for i, cls in enumerate(inst.color_classes):
        for l, v in enumerate(cls, 1):
            index[v] = (i, l)
            p = b.add(f"p^{i + 1}_{l}")
            # p_l sits at n+l from a_i and 2n-l from b_i: 3n between the hubs
            b.path(a[i], p, n + l, f"a_{i + 1}-p^{i + 1}_{l}")
            b.path(p, bb[i], 2 * n - l, f"p^{i + 1}_{l}-b_{i + 1}")
    for i1 in range(k):
        for i2 in range(i1 + 1, k):
            gv = b.add(f"g_{i1 + 1},{i2 + 1}")
            gend = b.add(f"g'_{i1 + 1},{i2 + 1}")
            b.path(gv, gend, 6 * n - 1, f"g_{i1 + 1},{i2 + 1}")
            for v1 in inst.color_classes[i1]:
                for v2 in inst.color_classes[i2]:
                    if inst.graph.has_edge(v1, v2):
                        continue
                    j1, j2 = index[v1][1], index[v2][1]
                    name = f"u_{{{v1},{v2}}}"
                    ue = b.add(name)
                    b.path(ue, a[i1], 5 * n - j1, f"{name}-a_{i1 + 1}")
                    b.path(ue, bb[i1], 4 * n + j1, f"{name}-b_{i1 + 1}")
                    b.path(ue, a[i2], 5 * n - j2, f"{name}-a_{i2 + 1}")
                    b.path(ue, bb[i2], 4 * n + j2, f"{name}-b_{i2 + 1}")
                    b.edges.append((gv, ue))
    graph, prov = b.build(allow_disconnected=True)
    return GadgetInstance(graph, Fraction(6 * n), k * k, prov)


def has_mcis(inst: McisInstance) -> list[int] | None:
    """A multicolored independent set by exhaustive search, or ``None``."""
    for pick in product(*inst.color_classes):
        if all(not inst.graph.has_edge(x, y) for i, x in enumerate(pick) for y in pick[i + 1:]):
            return list(pick)
    return None


def parse_dimacs(text: str) -> tuple[int, list[tuple[int, ...]]]:
    """Parse DIMACS CNF into ``(variables, clauses)``; literals are signed ints."""
    nvars = None
    clauses: list[tuple[int, ...]] = []
    cur: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line[0] in "c%":
            continue
        if line[0] == "p":
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"line {lineno}: expected 'p cnf <vars> <clauses>'")
            nvars = int(parts[2])
            continue
        if nvars is None:
            raise ValueError(f"line {lineno}: clause before the 'p cnf' header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ValueError(f"line {lineno}: bad literal {tok!r}") from None
            if lit == 0:
                if cur:
                    clauses.append(tuple(cur))
                cur = []
            elif abs(lit) > nvars:
                raise ValueError(f"line {lineno}: variable {abs(lit)} exceeds the declared {nvars}")
            else:
                cur.append(lit)
    if nvars is None:
        raise ValueError("missing 'p cnf' header")
    if cur:
        clauses.append(tuple(cur))
    return nvars, clauses


def is_satisfiable(nvars: int, clauses) -> bool:
    for bits in product((False, True), repeat=nvars):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in clauses):
            return True
    return False


def gen_sat_to_mcis(nvars: int, clauses) -> McisInstance:
    """Split the clauses into ⌈√N⌉ consecutive groups; a class holds the
    satisfying assignments of one group, and assignments of different groups
    that disagree on a shared variable are adjacent.

    Classes are padded to equal size with vertices adjacent to everything in
    the other classes, so they never take part in a multicolored set.
    """
    if nvars < 1:
        raise ValueError("need at least one variable")
    clauses = [tuple(c) for c in clauses]
    groups_n = math.isqrt(nvars - 1) + 1
    base, rem = divmod(len(clauses), groups_n)
    groups, at = [], 0
    for i in range(groups_n):
        size = base + (i < rem)
        groups.append(clauses[at:at + size])
        at += size
    classes: list[list[dict[int, bool]]] = []
    for grp in groups:
        vs = sorted({abs(l) for c in grp for l in c})
        sat = []
        for bits in product((False, True), repeat=len(vs)):
            val = dict(zip(vs, bits))
            if all(any(val[abs(l)] == (l > 0) for l in c) for c in grp):
                sat.append(val)
        classes.append(sat)
    width = max(len(c) for c in classes)
    ids, labels, members = [], {}, []
    for i, sat in enumerate(classes):
        row = []
        for j in range(width):
            v = len(labels)
            if j < len(sat):
                labels[v] = f"F{i + 1}:" + ",".join(f"{'' if t else '-'}x{x}" for x, t in sat[j].items())
            else:
                labels[v] = f"F{i + 1}:pad{j - len(sat) + 1}"
            row.append(v)
        members.append(row)
        ids.append(sat)
    edges = []
    for i1 in range(len(classes)):
        for i2 in range(i1 + 1, len(classes)):
            for j1, v1 in enumerate(members[i1]):
                for j2, v2 in enumerate(members[i2]):
                    s1 = ids[i1][j1] if j1 < len(ids[i1]) else None
                    s2 = ids[i2][j2] if j2 < len(ids[i2]) else None
                    if s1 is None or s2 is None or any(s1[x] != s2[x] for x in s1.keys() & s2.keys()):
                        edges.append((v1, v2))
    graph = Graph(len(labels), edges, allow_disconnected=True)
    return McisInstance(graph, tuple(tuple(r) for r in members), labels)
