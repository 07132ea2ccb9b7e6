import os
import random
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from dispersol.graph import Graph

settings.register_profile(
    "default",
    max_examples=int(os.environ.get("HYPOTHESIS_EXAMPLES", "60")),
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def path_graph(n):
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n):
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n):
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star(leaves):
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def to_nx(g):
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return h


def random_connected(rng, n, max_edges=None):
    edges = {(rng.randrange(i), i) for i in range(1, n)}
    cap = n * (n - 1) // 2 if max_edges is None else min(max_edges, n * (n - 1) // 2)
    target = rng.randint(len(edges), max(len(edges), cap))
    while len(edges) < target:
        u, v = sorted(rng.sample(range(n), 2))
        edges.add((u, v))
    return Graph(n, sorted(edges))


@st.composite
def connected_graphs(draw, min_n=1, max_n=7, max_edges=9):
    n = draw(st.integers(min_n, max_n))
    parents = [draw(st.integers(0, i - 1)) for i in range(1, n)]
    edges = {(p, i) for i, p in zip(range(1, n), parents)}
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n) if (u, v) not in edges]
    room = max(0, min(len(pairs), max_edges - len(edges)))
    extra = draw(st.lists(st.sampled_from(pairs), max_size=room, unique=True)) if pairs and room else []
    return Graph(n, sorted(edges | set(extra)))


def rationals(max_num=5, max_den=4, low=None, high=None):
    out = st.builds(Fraction, st.integers(1, max_num), st.integers(1, max_den))
    if low is not None:
        out = out.filter(lambda x: x > low)
    if high is not None:
        out = out.filter(lambda x: x <= high)
    return out


@pytest.fixture
def rng():
    return random.Random(20240517)


_ACCEPTANCE: list[str] = []


@pytest.fixture
def acceptance_lines():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)
