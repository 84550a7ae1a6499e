import csv
import json
import shutil
import subprocess

import pytest

import oracles
from conftest import build
from cubical.cli import main


def run(tmp_path, *argv):
    out = tmp_path / "out"
    code = main([*argv, "--out", str(out)])
    return code, out


def read(out, name):
    return json.loads((out / name).read_text())


def test_gen_fixture_round_trip(tmp_path):
    code, out = run(tmp_path, "gen", "fixture", "C_grid(2,2)")
    assert code == 0
    code2, out2 = run(tmp_path / "b", "validate", str(out / "complex.json"))
    assert code2 == 0 and read(out2, "validate.json")["valid"] is True


def test_gen_raag(tmp_path):
    code, out = run(tmp_path, "gen", "raag", "--graph", "edge", "--radius", "1")
    assert code == 0 and read(out, "complex.json")["vertices"] == 9


def test_gen_raag_budget(tmp_path):
    code, _ = run(tmp_path, "gen", "raag", "--graph", "free-ab", "--radius", "3", "--budget", "10")
    assert code == 4


def test_stdout_only_main_json(capsys):
    assert main(["contact", "C_square"]) == 0
    body = json.loads(capsys.readouterr().out)
    assert body["seed"] == 0


def test_contact_outputs(tmp_path):
    code, out = run(tmp_path, "contact", "C_grid(2,2)")
    assert code == 0
    body = read(out, "contact.json")
    C = build("C_grid(2,2)")
    classes = list(oracles.theta_classes(C))
    touching = sum(oracles.in_contact(a, b) for i, a in enumerate(classes) for b in classes[i + 1:])
    assert body["sizes"]["contact_edges"] == touching
    assert (out / "contact.dot").read_text().startswith("graph")
    assert (out / "crossing.dot").exists()
    code, out2 = run(tmp_path / "alias", "analyze", "contact", "C_grid(2,2)")
    assert code == 0 and read(out2, "contact.json") == body


def test_factors_report(tmp_path):
    code, out = run(tmp_path, "factors", "C_grid(2,2)")
    assert code == 0
    body = read(out, "factors.json")
    members = {frozenset(m) for m in body["members"]}
    assert members == oracles.minimal_factor_system(build("C_grid(2,2)"), 1)


def test_factors_raag(tmp_path):
    code, gen = run(tmp_path / "g", "gen", "raag", "--graph", "edge", "--radius", "1")
    code, out = run(tmp_path, "factors", str(gen / "complex.json"), "--raag", "edge")
    assert code == 0 and len(read(out, "factors.json")["members"]) == 7


def test_distance_fit(tmp_path):
    code, out = run(tmp_path, "distance-fit", "C_grid(2,2)", "--s", "1")
    assert code == 0
    rows = list(csv.reader((out / "distance_fit.csv").open()))
    assert len(rows) - 1 == 9 * 8 // 2
    fit = read(out, "distance_fit.json")
    assert fit["s"] == 1 and fit["seed"] == 0


def test_distance_fit_default_threshold(tmp_path):
    code, out = run(tmp_path, "distance-fit", "C_square", "--xi", "2")
    assert code == 0 and read(out, "distance_fit.json")["s"] == 18


def test_hier_path(tmp_path):
    code, out = run(tmp_path, "hier-path", "C_grid(2,2)", "--from", "0,0", "--to", "2,2")
    assert code == 0
    body = read(out, "hier_path.json")
    assert len(body["path"]) == 5
    assert "digraph" in (out / "hier_path.dot").read_text() or \
        "graph" in (out / "hier_path.dot").read_text()


def test_realize_vertex_and_tuple(tmp_path):
    code, out = run(tmp_path, "realize", "C_grid(2,2)", "--vertex", "1,1")
    assert code == 0 and read(out, "realize.json")["theta"] == 0
    t = tmp_path / "t.json"
    t.write_text(json.dumps({"coords": [[0, 1], [0], [1]]}))
    code, out = run(tmp_path / "b", "realize", "C_grid(2,2)", "--tuple", str(t))
    assert code == 0 and read(out, "realize.json")["consistent"] is True


def test_hhs_audit_and_control(tmp_path):
    code, out = run(tmp_path, "hhs-audit", "C_square")
    assert code == 0 and read(out, "audit.json")["seed"] == 0
    code, out = run(tmp_path / "b", "hhs-audit", "C_square", "--negative-control", "bgi")
    assert code == 3


@pytest.mark.parametrize("argv,code", [
    (["validate", "missing.json"], 2),
    (["validate", "C_nothing"], 2),
    (["factors", "C_square", "--xi", "0"], 2),
    (["nonsense"], 2),
])
def test_exit_codes(tmp_path, argv, code):
    assert main([*argv, "--out", str(tmp_path)]) == code


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"vertices": 3,\n "edges": [[0, 1], [1, 9]]}')
    assert main(["validate", str(bad)]) == 2
    assert "line 2" in capsys.readouterr().err


def test_non_median_exit_code(tmp_path):
    six = tmp_path / "six.json"
    six.write_text(json.dumps({"vertices": 6, "edges": [[i, (i + 1) % 6] for i in range(6)]}))
    assert main(["validate", str(six), "--out", str(tmp_path / "o")]) == 3


def test_suite_deterministic_across_jobs(tmp_path):
    fx = "C_edge;C_square;C_grid(2,2)"
    a = run(tmp_path / "a", "suite", "--fixtures", fx, "--jobs", "1")
    b = run(tmp_path / "b", "suite", "--fixtures", fx, "--jobs", "2")
    for name in ("suite.json", "matrix.csv"):
        assert (a[1] / name).read_bytes() == (b[1] / name).read_bytes()
    header = next(csv.reader((a[1] / "matrix.csv").open()))
    assert "hhs_audit" in header


@pytest.mark.skipif(shutil.which("cubical") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["cubical", "validate", "C_edge"], capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["valid"] is True
