import json
from fractions import Fraction

import pytest
from click.testing import CliRunner

from conftest import path_graph, star
from dispersol.cli import export_dot, main
from dispersol.graph import format_graph, load_graph
from dispersol.metric import midpoint, on_edge, parse_points, vertex


@pytest.fixture
def run(tmp_path):
    runner = CliRunner()

    def invoke(*args, env=None):
        return runner.invoke(main, [str(a) for a in args], env=env, catch_exceptions=False)

    return invoke


@pytest.fixture
def p6(tmp_path):
    path = tmp_path / "p6.txt"
    path.write_text(format_graph(path_graph(7)))
    return path


def test_solve_p6(run, p6, tmp_path):
    pts, dot = tmp_path / "w.txt", tmp_path / "w.dot"
    res = run("solve", "--graph", p6, "--delta", "15/11", "--json", "--points-out", pts, "--dot", dot)
    assert res.exit_code == 0
    rep = json.loads(res.output)
    assert rep["schema"] == 1 and rep["optimum"] == 5 and rep["delta_star"] == "11/8"
    assert len(parse_points(pts.read_text(), path_graph(7))) == 5
    assert dot.read_text().count("shape=point") + dot.read_text().count('xlabel="0"') == 5
    assert all("/" in w["lam"] for w in rep["witness"] if "lam" in w)


def test_solve_is_deterministic(run, p6):
    a = run("solve", "--graph", p6, "--delta", "3/2", "--json").output
    b = run("solve", "--graph", p6, "--delta", "3/2", "--json").output
    assert a == b and json.loads(a)["optimum"] == 5


def test_decide_exit_codes(run, tmp_path):
    g = tmp_path / "star.txt"
    g.write_text(format_graph(star(3)))
    res = run("decide", "--graph", g, "--delta", "2", "--k", "1")
    assert res.exit_code == 0 and "yes" in res.output
    res = run("decide", "--graph", g, "--delta", "2", "--k", "4")
    assert res.exit_code == 1 and "no" in res.output


def test_verify(run, tmp_path):
    g = tmp_path / "g.txt"
    g.write_text(format_graph(path_graph(3)))
    good, bad = tmp_path / "good.txt", tmp_path / "bad.txt"
    good.write_text("V 0\nV 2\n")
    bad.write_text("V 0\nE 0 1 1 2\n")
    assert run("verify", "--graph", g, "--delta", "3/2", "--points", good).exit_code == 0
    res = run("verify", "--graph", g, "--delta", "3/2", "--points", bad, "--json")
    assert res.exit_code == 1
    assert json.loads(res.output)["violation"]["items"] == [{"vertex": 0}, {"edge": [0, 1], "lam": "1/2"}]


def test_round_p6(run, p6, tmp_path):
    start = tmp_path / "s.txt"
    start.write_text("V 0\nE 1 2 4 11\nE 2 3 8 11\nE 4 5 1 11\nE 5 6 5 11\n")
    out, trace = tmp_path / "r.txt", tmp_path / "t.json"
    res = run("round", "--graph", p6, "--delta", "15/11", "--points", start, "--L", 6,
              "--points-out", out, "--trace", trace, "--json")
    assert res.exit_code == 0
    rep = json.loads(res.output)
    assert rep["delta_star"] == "11/8" and len(rep["points"]) == 5
    assert json.loads(trace.read_text())["steps"]
    assert run("verify", "--graph", p6, "--delta", "11/8", "--points", out).exit_code == 0


def test_translate_round_trip(run, tmp_path):
    g = tmp_path / "k2.txt"
    g.write_text(format_graph(path_graph(2)))
    s, up, down = tmp_path / "s.txt", tmp_path / "up.txt", tmp_path / "down.txt"
    s.write_text("E 0 1 1 2\n")
    assert run("translate", "up", "--graph", g, "--delta", "3", "--points", s, "--points-out", up).exit_code == 0
    assert up.read_text() == "E 0 1 1 8\nE 0 1 7 8\n"
    assert run("translate", "down", "--graph", g, "--delta", "3/4", "--points", up, "--points-out", down).exit_code == 0
    assert down.read_text() == s.read_text()


@pytest.mark.parametrize(
    "args, code",
    [
        (["--delta", "0.5"], 2),
        (["--delta", "-1"], 2),
        (["--delta", "3/2", "--method", "dp", "--budget", "1"], 3),
    ],
)
def test_solve_exit_codes(run, p6, args, code):
    assert run("solve", "--graph", p6, *args).exit_code == code


def test_disconnected_input(run, tmp_path):
    g = tmp_path / "d.txt"
    g.write_text("4 2\n0 1\n2 3\n")
    res = run("solve", "--graph", g, "--delta", "1")
    assert res.exit_code == 2 and "disconnected" in res.output
    res = run("solve", "--graph", g, "--delta", "1", "--allow-disconnected", "--json")
    assert res.exit_code == 0 and json.loads(res.output)["optimum"] == 4


def test_budget_env(run, p6):
    res = run("solve", "--graph", p6, "--delta", "15/11", "--method", "dp", env={"DISPERSOL_BUDGET": "10"})
    assert res.exit_code == 3


def test_gen_commands(run, tmp_path):
    src = tmp_path / "p3.txt"
    src.write_text(format_graph(path_graph(3)))
    out = tmp_path / "gad.txt"
    assert run("gen", "is", "--in", src, "--delta", "5/2", "--out", out).exit_code == 0
    prov = json.loads((tmp_path / "gad.txt.json").read_text())
    assert prov["provenance"]["0"] == "0_1" and load_graph(out).n == 6
    res = run("solve", "--graph", out, "--delta", "5/2", "--json")
    assert json.loads(res.output)["optimum"] == 2
    assert run("gen", "chordal", "--in", src, "--delta", "2", "--out", out).exit_code == 2
    cnf = tmp_path / "f.cnf"
    cnf.write_text("p cnf 4 5\n1 0\n2 0\n-1 3 3 0\n3 4 4 0\n-4 0\n")
    assert run("gen", "sat", "--in", cnf, "--out", out).exit_code == 0
    meta = json.loads((tmp_path / "gad.txt.json").read_text())
    assert meta["k"] == 4 and meta["delta"] == "6/1"
    res = run("decide", "--graph", out, "--delta", "6", "--k", "4", "--allow-disconnected")
    assert res.exit_code == 0
    mc = tmp_path / "m.json"
    mc.write_text(json.dumps({"n": 2, "edges": [[0, 1]], "classes": [[0], [1]]}))
    assert run("gen", "mcis", "--in", mc, "--out", out).exit_code == 0
    assert run("decide", "--graph", out, "--delta", "6", "--k", "4", "--allow-disconnected").exit_code == 1


def test_oracle_commands(run, p6):
    res = run("oracle", "dispersion", "--graph", p6, "--delta", "15/11", "--json")
    assert json.loads(res.output)["optimum"] == 5
    res = run("oracle", "dis", "--graph", p6, "--d", "3", "--json")
    assert json.loads(res.output)["optimum"] == 3
    res = run("oracle", "suite", "--seed", 3, "--count", 5, "--max-n", 5)
    assert res.exit_code == 0 and "0 mismatches" in res.output


def test_export_dot():
    g = path_graph(2)
    dot = export_dot(g, [midpoint(0, 1)])
    assert dot.count('xlabel="1/2"') == 1
    plain = export_dot(g)
    assert "shape=point" not in plain and "0 -- 1" in plain
    third = on_edge(0, 1, Fraction(1, 3))
    assert export_dot(g, [vertex(0), third]) == export_dot(g, [third, vertex(0)])
