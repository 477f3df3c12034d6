import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from alignment_games.cli import main

SPECS = Path(__file__).resolve().parent.parent / "demos" / "specs"


def run(*argv, stdin=None, monkeypatch=None):
    out = io.StringIO()
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = main([str(a) for a in argv], out=out)
    return code, out.getvalue()


def spec(name):
    return SPECS / f"{name}.json"


def test_solve_matching_pennies():
    code, text = run("solve", spec("matching_pennies"))
    doc = json.loads(text)
    assert code == 0
    assert doc["value"]["exact"] == "1"
    probs = sorted(a["probability"]["exact"] for a in doc["hider"]["atoms"])
    assert probs == ["1/2", "1/2"]


def test_solve_interval_fixed():
    code, text = run("solve", spec("interval_fixed"))
    assert code == 0 and json.loads(text)["value"]["exact"] == "7/15"


def test_unequal_interval_has_no_closed_form(capsys):
    code, text = run("solve", spec("interval_unequal"))
    assert code == 2 and text == ""
    assert "no closed form; try `oracle`" in capsys.readouterr().err


def test_oracle_on_unequal_interval():
    code, text = run("oracle", spec("interval_unequal"), "--grid", "1/20")
    doc = json.loads(text)
    assert code == 0 and 0 < doc["value"]["decimal"] < 1


def test_oracle_matrix_output():
    code, text = run("oracle", spec("matching_pennies"), "--matrix")
    doc = json.loads(text)
    assert code == 0 and doc["matrix"]["entries"] == [["0", "2"], ["2", "0"]]


def test_verify_hider_cardinality():
    code, text = run("verify", spec("hider_cardinality"))
    doc = json.loads(text)
    assert code == 0 and doc["passed"]
    assert doc["hider_gap"]["exact"] == doc["searcher_gap"]["exact"] == "0"
    assert doc["oracle_value"]["exact"] == "5"


def test_solve_then_verify_round_trip(tmp_path):
    for name in ("singleton", "hider_cardinality", "interval_fixed"):
        code, text = run("solve", spec(name))
        path = tmp_path / f"{name}.sol.json"
        path.write_text(text)
        code, report = run("verify", spec(name), "--solution", path)
        assert code == 0 and json.loads(report)["passed"], name


def test_verify_failure_exit_code(tmp_path):
    code, text = run("solve", spec("matching_pennies"))
    doc = json.loads(text)
    doc["hider"]["atoms"] = [{"set": [1], "probability": "1"}]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, report = run("verify", spec("matching_pennies"), "--solution", path)
    assert code == 4 and not json.loads(report)["passed"]


def test_power_set_limit():
    code, _ = run("verify", spec("powerset12"))
    assert code == 3


@pytest.mark.slow
def test_verify_power_set_ten_locations():
    code, text = run("verify", spec("powerset10"))
    assert code == 0 and json.loads(text)["passed"]


def test_simulate_circle():
    code, text = run("simulate", spec("circle_free"), "--trials", "200000", "--seed", "1")
    doc = json.loads(text)
    assert code == 0 and doc["trials"] == 200000 and doc["seed"] == 1
    assert abs(doc["mean"] - 0.75) <= 4 * doc["std_error"]


def test_simulate_is_byte_identical():
    args = ("simulate", spec("hider_cardinality"), "--trials", "50000", "--seed", "11")
    assert run(*args) == run(*args)


def test_simulate_zero_trials():
    assert run("simulate", spec("circle_free"), "--trials", "0", "--seed", "1")[0] == 1


def test_seed_mandatory_under_ci(monkeypatch):
    monkeypatch.setenv("CI", "true")
    assert run("simulate", spec("circle_free"), "--trials", "10")[0] == 1
    monkeypatch.setenv("CI", "")
    assert run("simulate", spec("circle_free"), "--trials", "10")[0] == 0


def test_sweep_alpha():
    code, text = run("sweep", spec("interval_fixed"), "--param", "alpha",
                     "--from", "0.1", "--to", "1", "--steps", "10")
    lines = text.splitlines()
    assert code == 0 and lines[0] == "param,value,provenance" and len(lines) == 11
    row = next(l for l in lines if l.startswith("0.4,"))
    assert float(row.split(",")[1]) == pytest.approx(7 / 15)


def test_sweep_k():
    code, text = run("sweep", spec("hider_cardinality"), "--param", "k",
                     "--from", "0", "--to", "4", "--steps", "5")
    values = [float(l.split(",")[1]) for l in text.splitlines()[1:]]
    assert code == 0 and values == [0, 3.5, 5, 3.5, 0]


def test_sweep_cost_entry():
    code, text = run("sweep", spec("singleton"), "--param", "cost[1]",
                     "--from", "1", "--to", "3", "--steps", "3")
    assert code == 0 and len(text.splitlines()) == 4


def test_sweep_marks_missing_closed_forms():
    code, text = run("sweep", spec("interval_unequal"), "--param", "alpha",
                     "--from", "0.2", "--to", "0.4", "--steps", "3")
    assert code == 0 and text.splitlines()[1].endswith(",,no closed form")


@pytest.mark.parametrize("extra", [("--steps", "0"), ("--steps", "3", "--param", "gamma")])
def test_sweep_bad_arguments(extra):
    argv = ["sweep", spec("interval_fixed"), "--from", "0.1", "--to", "0.5"]
    if "--param" not in extra:
        argv += ["--param", "alpha"]
    assert run(*argv, *extra)[0] == 1


def test_stdin_input(monkeypatch):
    text = spec("matching_pennies").read_text()
    code, out = run("solve", "-", stdin=text, monkeypatch=monkeypatch)
    assert code == 0 and json.loads(out)["value"]["exact"] == "1"


@pytest.mark.parametrize("doc,field", [
    ({"domain": "sphere", "costs": 1, "hider": {"type": "free_length"},
      "searcher": {"type": "free_length"}}, "domain"),
    ({"domain": "finite", "costs": [1, "x"], "hider": {"type": "power_set"},
      "searcher": {"type": "power_set"}}, "costs[1]"),
    ({"domain": "finite", "costs": [1, 2], "penalties": [1],
      "hider": {"type": "power_set"}, "searcher": {"type": "power_set"}}, "penalties"),
    ({"domain": "finite", "costs": [1, 2], "hider": {"type": "fixed_cardinality", "k": 1.5},
      "searcher": {"type": "power_set"}}, "hider.k"),
    ({"domain": "circle", "costs": 1, "hider": {"type": "power_set"},
      "searcher": {"type": "free_length"}}, "hider.type"),
    ({"domain": "finite", "costs": [1], "searcher": {"type": "power_set"}}, "hider"),
])
def test_invalid_fields_are_named(tmp_path, capsys, doc, field):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    assert run("solve", path)[0] == 1
    assert f"{field}:" in capsys.readouterr().err


def test_unreadable_file(tmp_path):
    assert run("solve", tmp_path / "missing.json")[0] == 1
    bad = tmp_path / "broken.json"
    bad.write_text("{not json")
    assert run("solve", bad)[0] == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "alignment_games", "solve", str(spec("singleton"))],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["provenance"]
