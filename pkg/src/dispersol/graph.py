"""Unit-edge graphs: representation, parsing, hop metric, subdivision and
structural helpers (longest-path bound, greedy matching, tree decompositions)."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable

INF = math.inf


class GraphError(ValueError):
    """Malformed or unsupported graph input."""


class Graph:
    """Undirected simple graph on vertices ``0..n-1`` with unit-length edges.

    Immutable after construction.  Connectivity is enforced unless
    ``allow_disconnected`` is set (only the gadget generators need that).
    """

    __slots__ = ("n", "edges", "adj", "_edge_set")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]], *, allow_disconnected: bool = False):
        if n < 1 and not (n == 0 and allow_disconnected):
            raise GraphError("graph needs at least one vertex")
        norm = set()
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise GraphError(f"loop at vertex {u}")
            e = (u, v) if u < v else (v, u)
            if e in norm:
                raise GraphError(f"parallel edge {e}")
            norm.add(e)
        self.n = n
        self.edges: tuple[tuple[int, int], ...] = tuple(sorted(norm))
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        self.adj: tuple[tuple[int, ...], ...] = tuple(tuple(sorted(a)) for a in adj)
        self._edge_set = frozenset(self.edges)
        if not allow_disconnected and not self.is_connected():
            raise GraphError("graph is disconnected")

    @property
    def m(self) -> int:
        return len(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return ((u, v) if u < v else (v, u)) in self._edge_set

    def is_connected(self) -> bool:
        seen = {0}
        stack = [0]
        while stack:
            for w in self.adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.n

    def components(self) -> list[list[int]]:
        comp = [-1] * self.n
        out = []
        for s in range(self.n):
            if comp[s] >= 0:
                continue
            comp[s] = len(out)
            part = [s]
            stack = [s]
            while stack:
                for w in self.adj[stack.pop()]:
                    if comp[w] < 0:
                        comp[w] = len(out)
                        part.append(w)
                        stack.append(w)
            out.append(sorted(part))
        return out

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


# ---------------------------------------------------------------- text format

def parse_graph(text: str, *, allow_disconnected: bool = False) -> Graph:
    """Parse ``n m`` followed by ``m`` lines ``u v``; ``#`` starts a comment."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append((lineno, line.split()))
    if not rows:
        raise GraphError("empty graph file")
    lineno, head = rows[0]
    try:
        n, m = (int(x) for x in head)
    except ValueError:
        raise GraphError(f"line {lineno}: expected header 'n m'") from None
    if len(rows) - 1 != m:
        raise GraphError(f"header declares {m} edges but file has {len(rows) - 1}")
    seen: dict[tuple[int, int], int] = {}
    for lineno, parts in rows[1:]:
        try:
            u, v = (int(x) for x in parts)
        except ValueError:
            raise GraphError(f"line {lineno}: expected 'u v'") from None
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"line {lineno}: vertex out of range 0..{n - 1}")
        if u == v:
            raise GraphError(f"line {lineno}: loop at vertex {u}")
        e = (min(u, v), max(u, v))
        if e in seen:
            raise GraphError(f"line {lineno}: multi-edge {e} (first on line {seen[e]})")
        seen[e] = lineno
    edges = list(seen)
    g = Graph(n, edges, allow_disconnected=True)
    if not allow_disconnected and not g.is_connected():
        raise GraphError("graph is disconnected")
    return g


def load_graph(path, *, allow_disconnected: bool = False) -> Graph:
    with open(path) as fh:
        return parse_graph(fh.read(), allow_disconnected=allow_disconnected)


def format_graph(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines += [f"{u} {v}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- metric

def bfs_distances(g: Graph, source: int) -> list:
    dist = [INF] * g.n
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in g.adj[u]:
            if dist[w] == INF:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def all_pairs_distances(g: Graph) -> tuple[tuple, ...]:
    """Hop-count matrix; unreachable pairs are ``math.inf``."""
    return tuple(tuple(bfs_distances(g, s)) for s in range(g.n))


# ---------------------------------------------------------------- subdivision

def subdivide(g: Graph, c: int) -> tuple[Graph, dict[tuple[int, int], list[int]]]:
    """Replace every edge by a path of ``c`` edges.

    Returns the new graph and, per original edge ``(u, v)``, the vertex
    sequence of its path from ``u`` to ``v`` (endpoints included).
    """
    if c < 1:
        raise ValueError("subdivision factor must be >= 1")
    edges = []
    paths = {}
    nxt = g.n
    for u, v in g.edges:
        seq = [u] + list(range(nxt, nxt + c - 1)) + [v]
        nxt += c - 1
        paths[(u, v)] = seq
        edges.extend(zip(seq, seq[1:]))
    return Graph(nxt, edges, allow_disconnected=True), paths


# ---------------------------------------------------------------- longest path

EXACT_LONGEST_PATH_LIMIT = 12


def longest_path_length(g: Graph) -> int:
    """Exact number of edges on a longest simple path (bitmask DP)."""
    n = g.n
    nbr = [sum(1 << w for w in g.adj[v]) for v in range(n)]
    # reach[mask] = bitmask of end vertices of simple paths covering mask
    reach = [0] * (1 << n)
    best = 0
    for v in range(n):
        reach[1 << v] = 1 << v
    for mask in range(1, 1 << n):
        ends = reach[mask]
        if not ends:
            continue
        k = mask.bit_count() - 1
        if k > best:
            best = k
        if best == n - 1:
            break
        e = ends
        while e:
            low = e & -e
            v = low.bit_length() - 1
            e ^= low
            ext = nbr[v] & ~mask
            while ext:
                bit = ext & -ext
                ext ^= bit
                reach[mask | bit] |= bit
    return best


def longest_path_bound(g: Graph, hint: int | None = None) -> int:
    """Upper bound ``L`` on the length of simple paths.

    A user hint is trusted as is.  Otherwise the exact value for small graphs
    and ``n - 1`` beyond that.
    """
    if hint is not None:
        if hint < 0:
            raise ValueError("path-length hint must be non-negative")
        return hint
    if g.n <= EXACT_LONGEST_PATH_LIMIT:
        return longest_path_length(g)
    return g.n - 1


# ---------------------------------------------------------------- matching

@dataclass(frozen=True)
class Matching:
    matched_edges: tuple[tuple[int, int], ...]

    @property
    def size(self) -> int:
        return len(self.matched_edges)


def greedy_maximal_matching(g: Graph) -> Matching:
    used = set()
    chosen = []
    for u, v in g.edges:
        if u not in used and v not in used:
            used.update((u, v))
            chosen.append((u, v))
    return Matching(tuple(chosen))


# ---------------------------------------------------------------- tree decompositions

class DecompositionError(ValueError):
    """A provided tree decomposition violates one of its invariants."""


@dataclass(frozen=True)
class TreeDecomposition:
    bags: tuple[frozenset, ...]
    tree_edges: tuple[tuple[int, int], ...]

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1


def check_decomposition(g: Graph, td: TreeDecomposition) -> None:
    nb = len(td.bags)
    if nb == 0:
        raise DecompositionError("no bags")
    tadj: list[list[int]] = [[] for _ in range(nb)]
    for a, b in td.tree_edges:
        if not (0 <= a < nb and 0 <= b < nb) or a == b:
            raise DecompositionError(f"bad tree edge ({a},{b})")
        tadj[a].append(b)
        tadj[b].append(a)
    if len(td.tree_edges) != nb - 1 or len(_reach(tadj, [0], lambda i: True)) != nb:
        raise DecompositionError("bag graph is not a tree")
    for v in range(g.n):
        holding = [i for i, b in enumerate(td.bags) if v in b]
        if not holding:
            raise DecompositionError(f"vertex {v} is in no bag")
        if len(_reach(tadj, holding[:1], lambda i: v in td.bags[i])) != len(holding):
            raise DecompositionError(f"bags containing vertex {v} are not connected")
    for u, v in g.edges:
        if not any(u in b and v in b for b in td.bags):
            raise DecompositionError(f"edge ({u},{v}) is in no bag")


def _reach(tadj, start, ok):
    seen = set(start)
    stack = list(start)
    while stack:
        for j in tadj[stack.pop()]:
            if j not in seen and ok(j):
                seen.add(j)
                stack.append(j)
    return seen


def min_fill_decomposition(g: Graph) -> TreeDecomposition:
    """Decomposition from a min-fill elimination order (ties: min degree, then id)."""
    nbrs = {v: set(g.adj[v]) for v in range(g.n)}
    order = []
    bag_of = {}
    while nbrs:
        best = None
        for v in sorted(nbrs):
            nv = sorted(nbrs[v])
            fill = sum(1 for i, a in enumerate(nv) for b in nv[i + 1:] if b not in nbrs[a])
            key = (fill, len(nv), v)
            if best is None or key < best:
                best = key
        v = best[2]
        nv = nbrs.pop(v)
        for a in nv:
            nbrs[a].discard(v)
            nbrs[a].update(nv - {a})
        order.append(v)
        bag_of[v] = frozenset(nv | {v})
    pos = {v: i for i, v in enumerate(order)}
    bags = [bag_of[v] for v in order]
    edges = []
    for i, v in enumerate(order):
        later = [w for w in bag_of[v] if w != v]
        if later:
            parent = min(later, key=pos.__getitem__)
            edges.append((i, pos[parent]))
        elif i + 1 < len(order):
            # root of a component: hang it under the last bag to keep one tree
            edges.append((i, len(order) - 1))
    return TreeDecomposition(tuple(bags), tuple(edges))


def parse_td(text: str, n: int | None = None) -> TreeDecomposition:
    """Parse a PACE ``.td`` file.  Bag and vertex ids there are 1-based.

    Without ``n`` the vertex count is taken from the header.
    """
    bags: dict[int, frozenset] = {}
    edges = []
    header = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        try:
            if parts[0] == "s":
                if parts[1] != "td" or len(parts) != 5:
                    raise DecompositionError(f"line {lineno}: expected 's td <bags> <width+1> <n>'")
                header = tuple(int(x) for x in parts[2:])
                if n is None:
                    n = header[2]
            elif parts[0] == "b":
                idx = int(parts[1])
                if header is None:
                    raise DecompositionError(f"line {lineno}: bag before the 's td' header")
                verts = frozenset(int(x) - 1 for x in parts[2:])
                if any(not 0 <= x < n for x in verts):
                    raise DecompositionError(f"line {lineno}: vertex out of range")
                bags[idx] = verts
            else:
                a, b = int(parts[0]), int(parts[1])
                edges.append((a, b))
        except (ValueError, IndexError):
            raise DecompositionError(f"line {lineno}: cannot parse {raw.strip()!r}") from None
    if header is None:
        raise DecompositionError("missing 's td' header")
    nbags, _, nv = header
    if nv != n:
        raise DecompositionError(f"decomposition is for {nv} vertices, graph has {n}")
    if sorted(bags) != list(range(1, nbags + 1)):
        raise DecompositionError("bag ids must be exactly 1..<bags>")
    td = TreeDecomposition(
        tuple(bags[i] for i in range(1, nbags + 1)),
        tuple((a - 1, b - 1) for a, b in edges),
    )
    return td


def format_td(td: TreeDecomposition, n: int) -> str:
    lines = [f"s td {len(td.bags)} {td.width + 1} {n}"]
    for i, b in enumerate(td.bags, 1):
        lines.append(" ".join(["b", str(i)] + [str(v + 1) for v in sorted(b)]))
    lines += [f"{a + 1} {b + 1}" for a, b in td.tree_edges]
    return "\n".join(lines) + "\n"


# nice decompositions ---------------------------------------------------------

LEAF, INTRODUCE, FORGET, JOIN = "leaf", "introduce", "forget", "join"


@dataclass(frozen=True)
class NiceNode:
    kind: str
    bag: tuple[int, ...]        # sorted
    vertex: int | None          # introduced / forgotten vertex
    children: tuple[int, ...]


@dataclass(frozen=True)
class NiceDecomposition:
    """Rooted nice decomposition; nodes are listed children-first, root last.

    Leaves and the root have empty bags.
    """

    nodes: tuple[NiceNode, ...]

    @property
    def width(self) -> int:
        return max(len(x.bag) for x in self.nodes) - 1

    @property
    def root(self) -> int:
        return len(self.nodes) - 1


def make_nice(td: TreeDecomposition) -> NiceDecomposition:
    nb = len(td.bags)
    tadj: list[list[int]] = [[] for _ in range(nb)]
    for a, b in td.tree_edges:
        tadj[a].append(b)
        tadj[b].append(a)
    nodes: list[NiceNode] = []

    def add(kind, bag, vertex, children):
        nodes.append(NiceNode(kind, tuple(sorted(bag)), vertex, tuple(children)))
        return len(nodes) - 1

    def chain(node, have, want):
        """Forget ``have - want`` then introduce ``want - have`` above ``node``."""
        cur = set(have)
        for v in sorted(cur - want):
            cur.discard(v)
            node = add(FORGET, cur, v, [node])
        for v in sorted(want - cur):
            cur.add(v)
            node = add(INTRODUCE, cur, v, [node])
        return node

    # iterative post-order from bag 0
    parent = {0: None}
    order = []
    stack = [0]
    while stack:
        i = stack.pop()
        order.append(i)
        for j in sorted(tadj[i], reverse=True):
            if j not in parent:
                parent[j] = i
                stack.append(j)
    kids = {i: [j for j in tadj[i] if parent.get(j) == i] for i in range(nb)}
    top = {}
    for i in reversed(order):
        bag = set(td.bags[i])
        subs = [chain(top[j], set(td.bags[j]), bag) for j in sorted(kids[i])]
        if not subs:
            subs = [chain(add(LEAF, (), None, []), set(), bag)]
        node = subs[0]
        for other in subs[1:]:
            node = add(JOIN, bag, None, [node, other])
        top[i] = node
    chain(top[0], set(td.bags[0]), set())
    return NiceDecomposition(tuple(nodes))


def tree_decomposition(g: Graph, provided: TreeDecomposition | None = None) -> NiceDecomposition:
    td = provided if provided is not None else min_fill_decomposition(g)
    check_decomposition(g, td)
    return make_nice(td)
