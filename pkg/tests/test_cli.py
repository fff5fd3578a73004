import json

import pytest

from lambdaquad.catalog import get_spec
from lambdaquad.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_run_f0(capsys, tmp_path):
    code, out = run(capsys, "run", "pg27_f0", "--tol", "1e-9", "--csv-dir", str(tmp_path))
    report = json.loads(out.out)
    assert code == 0 and report["passed"]
    brackets = [e for e in report["sections"]["step4_reduced"] if e["name"].startswith("[")]
    assert len(brackets) >= 6 and all(e["residual"] <= 1e-9 for e in brackets)
    drifts = [e for s, entries in report["sections"].items() if s.startswith("trajectory") for e in entries if "drift" in e["name"]]
    assert drifts and all(e["residual"] <= 1e-6 for e in drifts)
    assert (tmp_path / "pg27_f0_trajectory_1.csv").exists()


def test_run_route_and_out(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, _ = run(capsys, "run", "pg27_f0", "--route", "lateral", "--no-trajectories", "--out", str(out))
    report = json.loads(out.read_text())
    assert code == 0
    assert "lateral_reduced_auxiliary" in report["sections"]
    assert "step5_first_integrals" not in report["sections"]


def test_equal_lambdas(capsys, tmp_path):
    spec = get_spec("pg27_f0")
    spec["lambda2"] = spec["lambda1"]
    path = tmp_path / "same.json"
    path.write_text(json.dumps(spec))
    code, out = run(capsys, "run", str(path), "--no-trajectories")
    assert code == 1
    assert "equivalent symmetry pairs" in json.loads(out.out)["error"]


def test_verify(capsys):
    code, out = run(capsys, "verify", "pg27_f0")
    assert code == 0 and json.loads(out.out)["sections"] == {}
    code, out = run(capsys, "verify", "pg27_f0", "--ic", "0", "0", "1", "--x-end", "0.5")
    assert code == 1
    assert "inadmissible initial condition" in out.out
    code, out = run(capsys, "verify", "pg27_f0", "--ic", "0", "1", "0", "--x-end", "0.5")
    assert code == 0


def test_catalog_and_export(capsys, tmp_path):
    code, out = run(capsys, "catalog", "list")
    assert code == 0 and out.out.split() == ["example9", "pg27_airy", "pg27_f0", "pg27_general"]
    code, out = run(capsys, "export", "example9")
    assert json.loads(out.out)["phi"] == "-ux/u - 1/u - u"
    target = tmp_path / "ex9.json"
    run(capsys, "export", "example9", "--out", str(target))
    code, out = run(capsys, "export", str(target))
    assert code == 0 and json.loads(out.out) == json.loads(target.read_text())


@pytest.mark.parametrize("argv", [["run", "no_such_problem"], ["export", "pg27_general(1 +)"]])
def test_bad_input(capsys, caplog, argv):
    code, _ = run(capsys, *argv)
    assert code == 2 and "error" in caplog.text


def test_bad_json(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert run(capsys, "run", str(p))[0] == 2


def test_problem_without_g_pair(capsys, tmp_path):
    spec = get_spec("pg27_f0")
    del spec["g1"], spec["g2"]
    path = tmp_path / "nog.json"
    path.write_text(json.dumps(spec))
    code, out = run(capsys, "run", str(path))
    report = json.loads(out.out)
    assert code == 1 and report["error"] is None
    assert "step3_invariants" in report["sections"] and "step5_first_integrals" not in report["sections"]
    failed = [e["name"] for es in report["sections"].values() for e in es if not e["passed"]]
    assert failed == ["g-pair"]


def test_missing_base_point(capsys, tmp_path):
    spec = get_spec("example9")
    del spec["base_point"]
    path = tmp_path / "nobase.json"
    path.write_text(json.dumps(spec))
    assert run(capsys, "run", str(path))[0] == 2
