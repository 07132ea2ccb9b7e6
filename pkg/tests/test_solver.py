import random
from fractions import Fraction as F
from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import complete, connected_graphs, cycle, path_graph, random_connected, star
from dispersol.brute import brute_force_dispersion, max_independent_set
from dispersol.graph import Graph, all_pairs_distances, greedy_maximal_matching
from dispersol.metric import enumerate_grid_points, point_distance, validate_dispersed
from dispersol.solver import ResourceError, SolveOptions, decide_dispersion, solve_max_dispersion

PIPELINE = SolveOptions(method="dp")


@pytest.mark.parametrize("delta", [F(15, 11), F(3, 2)])
def test_p6(delta):
    for opts in (None, PIPELINE):
        rep = solve_max_dispersion(path_graph(7), delta, opts)
        assert rep.optimum == 5
        assert validate_dispersed(path_graph(7), rep.witness, delta)
    rep = solve_max_dispersion(path_graph(7), F(15, 11), PIPELINE)
    assert rep.delta_star == F(11, 8) and rep.method == "pipeline"


@pytest.mark.parametrize("delta, want", [(F(11, 10), 5), (F(3, 2), 5), (F(2), 5), (F(21, 10), 1)])
def test_star(delta, want):
    for opts in (None, PIPELINE):
        assert solve_max_dispersion(star(5), delta, opts).optimum == want


def test_triangle_small_distance():
    assert solve_max_dispersion(complete(3), F(31, 41), PIPELINE).optimum == 3


def test_descend_is_reported():
    rep = solve_max_dispersion(cycle(4), F(1, 3), PIPELINE)
    assert rep.optimum == 12
    assert rep.descend_steps == 2 and rep.extra == 8 and rep.d == 2 and rep.subdivision == 2


def test_far_distance_shortcut():
    rep = solve_max_dispersion(path_graph(4), 9)
    assert rep.method == "shortcut" and rep.optimum == 1
    g = Graph(4, [(0, 1), (2, 3)], allow_disconnected=True)
    assert solve_max_dispersion(g, 9).optimum == 2


def test_disconnected_adds_up():
    g = Graph(7, [(0, 1), (1, 2), (3, 4), (4, 5), (5, 6)], allow_disconnected=True)
    a = solve_max_dispersion(path_graph(3), F(3, 4)).optimum
    b = solve_max_dispersion(path_graph(4), F(3, 4)).optimum
    assert solve_max_dispersion(g, F(3, 4), PIPELINE).optimum == a + b


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        solve_max_dispersion(path_graph(2), 0)
    with pytest.raises(ValueError, match="method"):
        solve_max_dispersion(path_graph(2), 1, SolveOptions(method="magic"))


def test_resource_guards():
    g = random_connected(random.Random(5), 9, 20)
    with pytest.raises(ResourceError):
        solve_max_dispersion(g, F(7, 5), SolveOptions(method="dp", budget=10))
    # auto mode falls back to exhaustive search when the DP is over budget
    rep = solve_max_dispersion(g, F(7, 5), SolveOptions(budget=10, brute_limit=10))
    assert rep.method == "bruteforce"


def test_decide_examples():
    assert decide_dispersion(star(3), 2, 1).answer
    d = decide_dispersion(path_graph(5), 1, 2)
    assert d.answer and d.method == "shortcut" and validate_dispersed(path_graph(5), d.certificate, 1)
    d = decide_dispersion(path_graph(7), F(15, 11), 6)
    assert not d.answer and d.optimum == 5
    d = decide_dispersion(path_graph(7), F(15, 11), 5)
    assert d.answer and len(d.certificate) == 5
    assert decide_dispersion(path_graph(2), 5, 0).answer


@given(connected_graphs(max_n=6, max_edges=8), st.integers(1, 4), st.integers(1, 3))
def test_matching_lower_bound(g, a, b):
    delta = F(a, b)
    if delta <= 2:
        assert solve_max_dispersion(g, delta).optimum >= greedy_maximal_matching(g).size


@given(connected_graphs(max_n=5, max_edges=6), st.integers(1, 5), st.integers(1, 3), st.integers(1, 5), st.integers(1, 3))
def test_monotone_in_delta(g, a1, b1, a2, b2):
    lo, hi = sorted((F(a1, b1), F(a2, b2)))
    assert solve_max_dispersion(g, lo).optimum >= solve_max_dispersion(g, hi).optimum


@given(connected_graphs(max_n=6, max_edges=8), st.integers(1, 5), st.integers(1, 4))
def test_pipeline_matches_brute_force(g, a, b):
    delta = F(a, b)
    rep = solve_max_dispersion(g, delta, PIPELINE)
    assert rep.optimum == brute_force_dispersion(g, delta, max_points=200)[0]
    assert validate_dispersed(g, rep.witness, delta)


def _finer_grid_optimum(g, delta, refine):
    apsp = all_pairs_distances(g)
    pts = enumerate_grid_points(g, delta.denominator * refine)
    nbr = [0] * len(pts)
    for i, j in combinations(range(len(pts)), 2):
        if point_distance(apsp, pts[i], pts[j]) < delta:
            nbr[i] |= 1 << j
            nbr[j] |= 1 << i
    return len(max_independent_set(nbr))


@given(connected_graphs(max_n=4, max_edges=5), st.integers(1, 4), st.integers(1, 3))
def test_grid_oracle_agrees_with_finer_grids(g, a, b):
    # the exhaustive oracle searches the 1/(2b) grid; a finer grid finds nothing better
    delta = F(a, b)
    want = brute_force_dispersion(g, delta, max_points=200)[0]
    for refine in (2, 3):
        assert _finer_grid_optimum(g, delta, refine) == want
