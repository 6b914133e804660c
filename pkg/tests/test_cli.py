import io
import json

import pytest

from raag_workbench.cli import run
from raag_workbench.graph_core import SimplicialGraph
from raag_workbench.hnn_embed import build_gd, cor53_check
from raag_workbench.trace_words import parse_word

REPORT_KEYS = {"version", "command", "computed", "cited", "checks", "witnesses"}

TOY_PACKAGE = """\
[A]
vertices: x y
[B]
vertices: b
[phi]
x: b
y: ε
"""


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


def call_json(*argv):
    code, out, _ = call(*argv, "--json")
    return code, json.loads(out)


@pytest.fixture
def graph_file(tmp_path):
    path = tmp_path / "g.graph"
    path.write_text("vertices: a b c d\nedge: a b\nedge: c d\n")
    return path


def test_nf_example(tmp_path):
    path = tmp_path / "g.graph"
    path.write_text("vertices: a b\n")
    code, out, _ = call("nf", "--graph", path, "a a^-1")
    assert code == 0 and out == "normal_form: ε\n"


def test_bounds_delta_example():
    code, rep = call_json("bounds", "delta", "1", "--mode", "bound")
    assert code == 0
    assert set(rep) == REPORT_KEYS
    assert rep["computed"]["log2_gamma"] == 14
    assert rep["computed"]["closed_form_check"] == "pass"
    assert rep["computed"]["delta"] == "2^14 + 1"


def test_verify_hd_example():
    code, out, _ = call("verify-hd", "3")
    assert code == 0
    assert "[FAIL]" not in out and out.count("[PASS]") == 6
    assert "seed: 1729" in out


def test_exit_codes(graph_file, tmp_path):
    assert call("nf", "--graph", graph_file, "a q")[0] == 2
    assert call("nf", "a")[0] == 2
    assert call("nosuch")[0] == 2
    assert call("nf", "--graph", graph_file, "a", "--frobnicate")[0] == 2
    assert call("nf", "--graph", tmp_path / "missing.graph", "a")[0] == 2
    assert call("not-vsp", "2", "2", "1")[0] == 3
    assert call("bounds", "gamma", "1", "2")[0] == 2
    pkg = tmp_path / "toy.pkg"
    pkg.write_text(TOY_PACKAGE)
    code, rep = call_json("verify-prop52", "--package", pkg)
    assert code == 1
    assert rep["computed"]["sample_limited"]
    assert "b" in rep["witnesses"] and rep["witnesses"]["b"]["reason"]


def test_error_json_shape(graph_file):
    code, rep = call_json("nf", "--graph", graph_file, "a q")
    assert code == 2 and rep["error"] == "parse error" and "q" in rep["message"]
    code, rep = call_json("not-vsp", "2", "1", "1")
    assert code == 3 and rep["error"] == "precondition violated"


def test_errors_go_to_stderr(graph_file):
    code, out, err = call("nf", "--graph", graph_file, "a q")
    assert code == 2 and not out and err.startswith("parse error:")


@pytest.mark.parametrize("argv", [
    ("verify-hd", "2", "--samples", "20"),
    ("verify-prop52", "1", "--samples", "40"),
    ("hnn", "embed", "t x t^-1 y"),
    ("bounds", "table", "3"),
])
def test_json_is_deterministic(argv):
    a = call_json(*argv)
    b = call_json(*argv)
    assert a == b and a[0] == 0
    assert REPORT_KEYS <= set(a[1])
    if argv[0].startswith("verify"):
        assert a[1]["seed"] == 1729


def test_seed_is_echoed_and_used():
    _, rep = call_json("verify-prop52", "1", "--samples", "40", "--seed", "7")
    assert rep["seed"] == 7
    assert call("verify-hd", "1", "--seed", "-1")[0] == 2


def test_printed_words_reparse(graph_file):
    g = SimplicialGraph.from_file(graph_file)
    for word in ("b a c b^-1 d^2", "d c^-1 a^-1 a", "c a d^-1 b a^-1 c^-1"):
        _, rep = call_json("cyc", "--graph", graph_file, word)
        u = parse_word(g, rep["computed"]["conjugator"])
        t = parse_word(g, rep["computed"]["core"])
        assert u * t * ~u == parse_word(g, word)
        _, rep = call_json("nf", "--graph", graph_file, word)
        nf = rep["computed"]["normal_form"]
        assert parse_word(g, nf) == parse_word(g, word)
        assert call_json("nf", "--graph", graph_file, nf)[1]["computed"]["normal_form"] == nf
        _, rep = call_json("centralizer", "--graph", graph_file, word)
        for s in rep["computed"]["generators"]:
            assert parse_word(g, s).commutes(parse_word(g, word))


def test_printed_graph_reparses(tmp_path):
    text = cor53_check(build_gd(2)[0], samples=5)["a_implies_b"]["container_graph"]
    path = tmp_path / "c.graph"
    path.write_text(text)
    code, rep = call_json("clique", "--graph", path)
    assert code == 0 and rep["computed"]["clique_number"] == 3
    assert SimplicialGraph.from_text(text).to_text() == text


def test_pc_and_bounded_agree(graph_file):
    code, rep = call_json("pc", "--graph", graph_file, "a c a^-1", "a d a^-1", "--bound", "2")
    assert code == 0
    assert rep["computed"]["parabolic"] == "conj: a ; base: c d"
    assert rep["checks"]["bounded_search_agrees"]["passed"]


def test_supp_len_clique(graph_file):
    assert call_json("supp", "--graph", graph_file, "a b a^-1")[1]["computed"]["support"] == ["b"]
    assert call_json("len", "--graph", graph_file, "a b a^-1 c")[1]["computed"]["length"] == 2
    assert call_json("clique", "--graph", graph_file)[1]["computed"]["clique_number"] == 2


def test_stallings_command():
    code, rep = call_json("stallings", "x^-1 y x", "x^-2 y x^2", "--member", "x^-1 y^3 x", "--member", "y")
    assert code == 0
    c = rep["computed"]
    assert c["rank"] == 2 and c["free_basis"] and not c["whole_group"]
    assert c["member"] == {"x^-1 y^3 x": True, "y": False}
    assert c["alphabet"] == ["x", "y"]


def test_stallings_rejects_graph_with_edges(graph_file):
    assert call("stallings", "a", "--graph", graph_file)[0] == 3


def test_abel_command(tmp_path):
    path = tmp_path / "p.pres"
    path.write_text("gens: x y z\nrel: z^-1 x^-1 y x\nrel: z^-1 x^-2 y x^2\n")
    code, rep = call_json("abel", path)
    assert code == 0 and rep["computed"]["free_rank"] == 2
    assert rep["checks"]["certificate_kills_relators"]["passed"]
    path.write_text("gens: x\nrel: x^6\n")
    code, rep = call_json("abel", path)
    assert rep["computed"]["torsion"] == [6] and rep["computed"]["infinite_quotient_certificate"] is None


def test_build_and_certificates():
    code, rep = call_json("build-hd", "2")
    assert code == 0 and rep["computed"]["witnesses"] == ["x^-1 y x", "x^-1 x^-1 y x x"]
    assert rep["cited"]
    code, rep = call_json("not-vsp", "3", "1", "3")
    assert code == 0 and rep["checks"]["certificate_kills_relators"]["passed"]
    code, rep = call_json("build-gd", "4")
    assert code == 0 and rep["computed"]["clique_number_C"] == 5
    # cited facts never leak into the computed section
    assert not set(rep["cited"]) & set(map(str, rep["computed"].values()))


def test_drop_factors_command():
    code, rep = call_json("drop-factors", "2", "--pad", "2")
    assert code == 0
    assert rep["computed"]["kept"] == [1, 2] and rep["computed"]["dropped"] == [3, 4]


def test_bounds_commands():
    code, rep = call_json("bounds", "gamma", "2")
    assert rep["computed"]["log2_gamma"] == 124 and rep["computed"]["gamma"] == "2^124"
    code, rep = call_json("bounds", "table", "1", "6", "--mode", "exact")
    assert code == 0 and len(rep["computed"]["rows"]) == 6
    code, rep = call_json("bounds", "optimize", "10")
    assert code == 0 and rep["computed"]["feasible"]
    assert rep["computed"]["log2_gamma"] <= rep["computed"]["default_log2_gamma"]


def test_hnn_commands(tmp_path):
    code, rep = call_json("hnn", "reduce", "t z^-1 x^-1 y x t^-1")
    assert code == 0 and rep["computed"]["t_syllables"] == 2
    code, rep = call_json("hnn", "embed", "t", "--d", "2")
    assert rep["computed"]["flat"] == "t" and rep["computed"]["a_part"] == "ε"
    code, rep = call_json("hnn", "trivial", "t t^-1 x x^-1")
    assert rep["computed"]["trivial"] is True
    pkg = tmp_path / "toy.pkg"
    pkg.write_text(TOY_PACKAGE)
    code, rep = call_json("hnn", "reduce", "t y t^-1", "--package", pkg)
    assert code == 0 and rep["computed"]["reduced"] == "y"
    bad = tmp_path / "bad.pkg"
    bad.write_text("[A]\nvertices: x\n")
    assert call("hnn", "reduce", "t", "--package", bad)[0] == 2
