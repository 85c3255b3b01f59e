import json

import pytest

from agnoboost.cli import main
from agnoboost.core import TabulatedClass


@pytest.fixture
def files(tmp_path):
    (tmp_path / "H.json").write_text(json.dumps(TabulatedClass.full(4).to_json()))
    (tmp_path / "S.csv").write_text("x,y\n0,1\n1,1\n2,-1\n3,1\n0,1\n1,-1\n2,-1\n3,1\n")
    (tmp_path / "P.csv").write_text("f0,f1,y\n0.0,1.0,1\n1.0,0.0,-1\n2.0,2.0,1\n3.0,0.5,-1\n")
    (tmp_path / "spec.json").write_text(json.dumps({"domain_size": 4, "target_index": 6, "eta": 0.15}))
    voter = {
        "members": [
            {"hypothesis": {"kind": "tabulated", "values": v}, "weight": 1 / 3}
            for v in ([1, 1, -1, 1], [1, -1, -1, 1], [1, 1, -1, -1])
        ]
    }
    (tmp_path / "v.json").write_text(json.dumps(voter))
    return tmp_path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


BOOST = ["--m0", 1, "--theta", 0.45, "--delta", 0.1, "--delta0", 0.5, "--dstar", 2]


def test_boost(files, capsys):
    code, out, _ = run(capsys, "boost", "--data", files / "S.csv", "--class", files / "H.json", *BOOST, "--seed", 3)
    assert code == 0
    doc = json.loads(out)
    rep = doc["report"]
    assert rep["weak_calls"] == 440
    assert len(doc["voter"]["members"]) == rep["T"]
    assert {"round", "repeat", "indices", "seed"} <= set(doc["voter"]["members"][0]["provenance"])


def test_boost_to_file_and_dedup_off(files, capsys):
    out = files / "r.json"
    code, _, _ = run(
        capsys, "boost", "--data", files / "S.csv", "--class", files / "H.json", *BOOST,
        "--dedup", "off", "--search", "greedy", "--out", out,
    )
    assert code == 0
    rep = json.loads(out.read_text())["report"]
    assert rep["pool_size"] == rep["pool_size_raw"] == 440


def test_boost_learners(files, capsys):
    code, out, _ = run(
        capsys, "boost", "--data", files / "S.csv", "--class", files / "H.json", *BOOST,
        "--weak-learner", "faulty", "--bad-hypothesis-index", 15,
    )
    assert code == 0
    code, out, _ = run(capsys, "boost", "--data", files / "P.csv", *BOOST, "--weak-learner", "stump")
    assert code == 0
    assert json.loads(out)["voter"]["members"][0]["hypothesis"]["kind"] == "stump"


def test_budget_exit_code(files, capsys):
    code, _, err = run(
        capsys, "boost", "--data", files / "S.csv", "--class", files / "H.json", *BOOST, "--budget", 10
    )
    assert code == 2 and "budget" in err


def test_io_exit_code(files, capsys):
    code, _, err = run(capsys, "vc", "dim", "--class", files / "missing.json")
    assert code == 3


def test_invalid_input_exit_code(files, capsys):
    (files / "odd.csv").write_text("x,y\n0,1\n1,1\n2,1\n")
    code, _, err = run(capsys, "boost", "--data", files / "odd.csv", "--class", files / "H.json", *BOOST)
    assert code == 1 and "even" in err


def test_adaboost(files, capsys):
    hist = files / "hist.csv"
    code, out, _ = run(
        capsys, "adaboost", "--data", files / "S.csv", "--class", files / "H.json",
        "--theta", 0.2, "--rounds", 4, "--hist", hist,
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "round,error,alpha,Z" and len(lines) == 5
    rows = hist.read_text().splitlines()
    assert rows[0] == "margin,count"
    assert sum(int(r.split(",")[1]) for r in rows[1:]) == 8


def test_vc_commands(files, capsys):
    code, out, _ = run(capsys, "vc", "dim", "--class", files / "H.json")
    assert json.loads(out) == {"dimension": 4, "witness": [0, 1, 2, 3], "capped": False}
    code, out, _ = run(capsys, "vc", "dual", "--class", files / "H.json")
    assert json.loads(out)["dual_dimension"] == 2
    code, out, _ = run(capsys, "vc", "avgbound", "--T", 2, "--d", 1)
    assert json.loads(out)["bound"] == pytest.approx(24.635532333438687)


def test_vc_prune(files, capsys):
    code, out, _ = run(
        capsys, "vc", "prune", "--voter", files / "v.json", "--data", files / "S.csv",
        "--theta", 0.3, "--L", 5, "--seed", 1,
    )
    # the three-member voter misclassifies example 5
    assert code == 1
    (files / "S2.csv").write_text("x,y\n0,1\n2,-1\n")
    code, out, _ = run(
        capsys, "vc", "prune", "--voter", files / "v.json", "--data", files / "S2.csv",
        "--theta", 1 / 3, "--L", 9, "--seed", 1,
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["attempts"] >= 1 and doc["voter"]["T"] == 9


@pytest.mark.parametrize(
    "which,params,key,value",
    [
        ("maurer", {"L_emp": 0, "d": 1, "n": 1000, "delta": 0.05}, "value", 0.20848829739135179),
        ("bernstein", {"L_pop": 0.1, "n": 1000, "delta": 0.05}, "value", 0.12012353746312421),
        ("uc", {"d": 1, "n": 10000, "delta": 0.5}, "value", 1.0856456009178587),
        ("rademacher", {"d": 4, "n": 400}, "value", 3.1),
        ("main", {"err_star": 0.1, "d": 1, "d_star": 1, "theta": 0.45, "n": 10000, "delta": 0.1}, "T", 46),
        ("lower", {"d": 1, "gamma0": 0.5, "L": 0.25, "m": 1000, "C3": 1, "C4": 1}, "min_m", 64.0),
        ("cost", {"n": 8, "m0": 1, "theta": 0.45, "delta": 0.1, "delta0": 0.5}, "weak_calls", 440),
    ],
)
def test_bounds(capsys, which, params, key, value):
    code, out, _ = run(capsys, "bounds", which, "--json", json.dumps(params))
    assert code == 0
    assert json.loads(out)[key] == pytest.approx(value, rel=1e-12)


def test_bounds_missing_parameter(capsys):
    code, _, err = run(capsys, "bounds", "rademacher", "--json", '{"d": 1}')
    assert code == 1 and "n" in err


def test_main_bound_reports_vacuous(capsys):
    params = {"err_star": 0.1, "d": 1, "d_star": 1, "theta": 0.45, "n": 10000, "delta": 0.1}
    _, out, _ = run(capsys, "bounds", "main", "--json", json.dumps(params))
    assert json.loads(out)["vacuous"] is True


def test_experiment(files, capsys):
    out = files / "r.csv"
    code, _, _ = run(
        capsys, "experiment", "curve", "--spec", files / "spec.json", "--n", "8,16",
        "--trials", 3, "--seed", 7, "--out", out,
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "n,trial,seed,err_pop,err_star,excess,bound_value,weak_calls,combos"
    assert len(lines) == 7
    code, text, _ = run(capsys, "experiment", "check-bound", "--results", out, "--delta", 0.1)
    report = json.loads(text)
    assert report["rows"] == 6 and report["violations"] == 0 and report["within_delta_plus_slack"]
