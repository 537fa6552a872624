import json
import subprocess
import sys

import pytest

from projdyn import __version__
from projdyn.cli import main
from projdyn.schemas import validate

HENON = {"dim": 2, "vars": ["X1", "X2", "X3"], "coords": ["X1^2 - X2*X3", "X1*X3", "X3^2"]}


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


@pytest.fixture
def henon_file(tmp_path):
    p = tmp_path / "henon.json"
    p.write_text(json.dumps(HENON))
    return str(p)


def test_compose_henon(capsys, henon_file):
    code, rep = run(capsys, "compose", "--f", henon_file, "--g", henon_file)
    assert code == 0
    r = rep["result"]
    assert (r["raw_degree"], r["dropped_degree"], r["reduced_degree"]) == (4, 0, 4)
    assert rep["version"] == __version__ and rep["seed"] == 0
    assert rep["inputs"]["f"]["map"] == HENON
    validate(rep, "report")


def test_charpoly_largest_root(capsys):
    code, rep = run(capsys, "charpoly", "--poly", "z^4 - z^3 - 4*z - 8", "--largest-real-root", "--eps", "1e-6")
    assert code == 0
    e = rep["result"]["largest_real_root"]
    assert e["decimal"].startswith("2.3461") or e["decimal"].startswith("2.3462")
    validate(rep, "report")


def test_charpoly_matrix(capsys):
    code, rep = run(capsys, "charpoly", "--matrix", "[[0,-1],[1,0]]")
    assert code == 0 and rep["result"]["char_poly"] == "z^2 + 1"


def test_scenario_exit_zero(capsys):
    code, rep = run(capsys, "scenario", "--file", "scenarios/cremona-involution.json")
    assert code == 0 and rep["result"]["passed"]
    validate(rep, "report")


def test_scenario_failure_exit_four(capsys, tmp_path):
    doc = {"name": "bad", "maps": {"h": {"builder": "henon"}},
           "assertions": [{"op": "degree", "args": {"map": "h"}, "expect": 5, "provenance": "TRIVIAL"}]}
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(doc))
    code, rep = run(capsys, "scenario", "--file", str(p))
    assert code == 4 and rep["status"] == "assertion_failed"


def test_parse_error_exit_two_with_position(capsys):
    code, rep = run(capsys, "parse", "--coords", "x1 +* x2", "x2", "x3")
    assert code == 2
    assert rep["error"]["line"] == 1 and rep["error"]["column"] == 5
    validate(rep, "report")


def test_bad_json_exit_two(capsys, tmp_path):
    p = tmp_path / "m.json"
    p.write_text('{"dim": 2,\n  "vars": [}')
    code, rep = run(capsys, "parse", "--map", str(p))
    assert code == 2 and rep["error"]["line"] == 2


def test_schema_violation_exit_two(capsys, tmp_path):
    p = tmp_path / "m.json"
    p.write_text(json.dumps({"vars": ["x"], "coords": "x"}))
    code, _ = run(capsys, "parse", "--map", str(p))
    assert code == 2


def test_unknown_builtin_exit_two(capsys):
    code, _ = run(capsys, "iterate", "--map", "nonsense", "--N", "3")
    assert code == 2


def test_budget_exit_three(capsys):
    code, rep = run(capsys, "iterate", "--map", "f0", "--N", "3", "--max-terms", "50000")
    assert code == 3 and rep["status"] == "budget_exhausted"
    assert rep["result"]["degrees"] == [6, 16] and rep["result"]["complete"] is False


def test_budget_env_override(capsys, monkeypatch):
    monkeypatch.setenv("PROJDYN_TERM_BUDGET", "1")
    code, rep = run(capsys, "compose", "--f", "henon", "--g", "henon")
    assert code == 3 and rep["budget"]["max_terms"] == 1


def test_parse_round_trip_is_byte_identical(tmp_path, henon_file):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["parse", "--map", henon_file, "--emit-map", "-o", str(a)]) == 0
    assert main(["parse", "--map", str(a), "--emit-map", "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("builder", ["henon:a=2,c=1/3", "cremona_p3", "alpha0", "f0", "s0", "henon_inverse:a=3"])
def test_canonical_form_of_builtins(tmp_path, builder):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["parse", "--map", builder, "--emit-map", "-o", str(a)])
    main(["parse", "--map", str(a), "--emit-map", "-o", str(b)])
    assert a.read_bytes() == b.read_bytes()


def _strip_time(rep):
    rep = dict(rep)
    rep.pop("timestamp")
    return json.dumps(rep, sort_keys=True)


@pytest.mark.parametrize(
    "argv",
    [
        ["probe", "--map", "henon", "--seed", "7"],
        ["criteria", "--f", "cremona_p3", "--H", "x1", "--H", "x1 + x2"],
        ["cohomology", "--f-dv", "1,3,3,1", "--true-dv", "1,1,1,1", "--pushpull", "2,2"],
        ["monomial", "--matrix", "[[2,1],[1,1]]", "--N", "3"],
        ["stability", "--map", "henon", "--N", "4"],
        ["iterate", "--map", "cremona_p2", "--N", "4", "--lambda1"],
    ],
)
def test_determinism_and_schema(capsys, argv):
    c1, r1 = run(capsys, *argv)
    c2, r2 = run(capsys, *argv)
    assert c1 == c2 == 0
    assert _strip_time(r1) == _strip_time(r2)
    validate(r1, "report")


def test_cohomology_report(capsys):
    _, rep = run(capsys, "cohomology", "--f-dv", "1,3,3,1", "--true-dv", "1,1,1,1")
    assert rep["result"]["excess_components"] == ["0", "8", "8", "0"]
    assert rep["result"]["nonfunctoriality_witness"] == {"factors": [3], "terms": [{"exps": [1], "coeff": "1"}]}


def test_criteria_report(capsys):
    _, rep = run(capsys, "criteria", "--f", "cremona_p3", "--H", "x1")
    r = rep["result"]
    assert r["degree_drop_witness"] == "x1^2*x2^2*x3^2*x4^2"
    assert r["hypersurface_checks"] == [{"H": "x1", "collapses_into_indeterminacy": True}]


def test_probe_requires_p2(capsys):
    code, _ = run(capsys, "probe", "--map", "cremona_p3")
    assert code == 2


def test_output_file(tmp_path):
    out = tmp_path / "r.json"
    assert main(["stability", "--map", "henon", "--N", "3", "-o", str(out)]) == 0
    assert json.loads(out.read_text())["result"] == {"one_stable": True, "first_drop": None}


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "projdyn.cli", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and __version__ in proc.stdout
