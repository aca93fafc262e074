import io
import json
import subprocess
import sys
from fractions import Fraction as Q

import pytest

from virlike.catalog import FamilySpec
from virlike.cli import load_table, run_command, save_table
from virlike.verify import Window, tabulate


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_command(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_bracket_example():
    code, out, _ = run("bracket", "--a1", "1", "--b1", "-1", "--a2", "-1", "--b2", "-2")
    assert code == 0
    assert json.loads(out) == {
        "terms": [{"alpha": 0, "beta": -3, "coeff": "-1"}, {"alpha": 0, "beta": -2, "coeff": "-2"}],
        "central": "1/12",
    }


def test_bracket_csv():
    code, out, _ = run("bracket", "--a1", "2", "--b1", "1", "--a2", "1", "--b2", "1", "--format", "csv")
    assert code == 0 and out.splitlines() == ["alpha,beta,coeff", "3,3,-1", "c,,0"]


def test_jacobi_small_box():
    code, out, _ = run("jacobi", "--box", "1")
    d = json.loads(out)
    assert code == 0 and d["pass"] and d["triples_checked"] == 729


def test_verify_family_example():
    code, out, _ = run("verify", "--family", "F2", "--lambda", "1/2", "--mu", "1/3", "--window", "3,3,2,2")
    assert code == 0 and json.loads(out) == {"pass": True, "entries": []}


def test_verify_negative_parameters():
    code, _, _ = run("verify", "--family", "F3", "--lambda", "-1/2", "--mu", "-7/3", "--window", "2,2,1,1")
    assert code == 0


def test_verify_corrupted_table(tmp_path):
    t = tabulate(FamilySpec("F1", Q(1, 3), Q(1, 5), a=Q(1, 2)), Window.symmetric(2, 2, 2, 2))
    t.g[(0, 1, 0, 0)] += 1
    p = tmp_path / "bad.json"
    save_table(t, str(p))
    code, out, _ = run("verify", "--table", str(p))
    assert code == 1 and json.loads(out)["pass"] is False
    code, out, _ = run("verify", "--table", str(p), "--format", "csv")
    assert code == 1 and out.startswith("equation_id,h,k,r,s,m,n,residual\n")


def test_table_round_trip(tmp_path):
    t = tabulate(FamilySpec("F1", 0, 0, a=0), Window.symmetric(1, 1, 1, 1))
    p = tmp_path / "t.json"
    save_table(t, str(p))
    assert load_table(str(p)) == t
    text = p.read_text()
    save_table(load_table(str(p)), str(p))
    assert p.read_text() == text


def test_tabulate_then_classify(tmp_path):
    p = tmp_path / "t.json"
    code, _, _ = run("tabulate", "--family", "F5", "--lambda", "2", "--mu", "1/3", "--window", "2,2,2,2", "--out", str(p))
    assert code == 0
    code, out, _ = run("classify", "--table", str(p))
    d = json.loads(out)
    assert code == 0
    assert {"family": "F5", "paper_label": "B_{1,0,\\lambda,\\mu}", "a": "0", "lambda": "2", "mu": "1/3"} in d["matches"]


def test_classify_corrupted_exits_1(tmp_path):
    t = tabulate(FamilySpec("F1", Q(1, 3), Q(1, 5), a=Q(1, 2)), Window.symmetric(2, 2, 2, 2))
    t.f[(1, 1, 0, 0)] += 1
    p = tmp_path / "c.json"
    save_table(t, str(p))
    code, out, _ = run("classify", "--table", str(p))
    assert code == 1 and json.loads(out)["matches"] == []


def test_sweep_json():
    code, out, _ = run("sweep", "--deformation", "D_APRIME", "--lambda", "1/2", "--grid", "-1,-1/2,0,1/2,1", "--window", "2,2,2,2")
    assert code == 0
    assert json.loads(out) == [
        {"t": "-1", "pass": False}, {"t": "-1/2", "pass": False}, {"t": "0", "pass": True},
        {"t": "1/2", "pass": False}, {"t": "1", "pass": False},
    ]


def test_closure_and_box_flags():
    code, out, _ = run("closure", "--m", "2", "--n", "1", "--variant", "S", "--box", "0,8,-8,12", "--rounds", "3")
    d = json.loads(out)
    assert code == 0 and len(d["targets"]) == 18 and all(t["certified"] for t in d["targets"])
    code, out, _ = run("closure", "--m", "2", "--n", "1", "--box", "0,8,-8,5", "--rounds", "3")
    assert code == 1
    assert any(t["status"] == "not certified (box)" for t in json.loads(out)["targets"])


def test_ghw_and_act():
    code, out, _ = run("ghw-set", "--basis", "1,0,0,1", "--k1", "1", "--k2", "1")
    assert code == 0 and json.loads(out)["points"] == [[0, 0], [0, 1], [1, 0], [1, 1], [1, 2], [1, 3]]
    code, out, _ = run("act", "--family", "F1", "--lambda", "1/2", "--mu", "1/3", "--r", "1", "--s", "1", "--m", "0", "--n", "0")
    assert code == 0
    assert json.loads(out)["terms"] == [{"m": 1, "n": 1, "coeff": "1/3"}, {"m": 1, "n": 2, "coeff": "1/2"}]


@pytest.mark.parametrize(
    "argv",
    [
        ["bracket", "--a1", "1"],
        ["bracket", "--a1", "1", "--b1", "1", "--a2", "1", "--b2", "1", "--bogus", "1"],
        ["verify", "--family", "F2", "--lambda", "1", "--mu", "1/3"],
        ["verify", "--family", "F2", "--lambda", "2/4", "--mu", "1/3"],
        ["verify"],
        ["verify", "--window", "1,2"],
        ["ghw-set", "--basis", "2,0,0,2", "--k1", "1", "--k2", "1"],
        ["closure", "--m", "1", "--n", "1", "--box", "0,8,0,8"],
        ["classify", "--table", "/nonexistent/t.json"],
        ["sweep", "--deformation", "D_APRIME", "--lambda", "1"],
        ["sweep", "--deformation", "D_APRIME", "--lambda", "1/2", "--grid", "1,2"],
        ["frobnicate"],
        [],
    ],
)
def test_invalid_input_exit_2(argv):
    code, out, err = run(*argv)
    assert code == 2
    assert out == ""
    assert err.startswith("virlike: error:") and err.count("\n") == 1


def test_schema_violations_exit_2(tmp_path):
    d = tabulate(FamilySpec("F1", 0, 0), Window.symmetric(1, 1, 1, 1)).to_dict()
    d["f"][0]["value"] = "2/4"
    p = tmp_path / "nc.json"
    p.write_text(json.dumps(d))
    assert run("classify", "--table", str(p))[0] == 2
    del d["g"]
    p.write_text(json.dumps(d))
    assert run("verify", "--table", str(p))[0] == 2
    p.write_text("{not json")
    assert run("classify", "--table", str(p))[0] == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "virlike", "bracket", "--a1", "0", "--b1", "2", "--a2", "0", "--b2", "-2"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout) == {"terms": [{"alpha": 0, "beta": 0, "coeff": "-4"}], "central": "1/2"}
