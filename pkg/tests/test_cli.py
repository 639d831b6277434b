import csv
import io
import json
import subprocess
import sys

import pytest

from fwkit.cli import main
from fwkit.solver import CSV_HEADER


def _rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


@pytest.fixture
def lb_spec(tmp_path):
    path = tmp_path / "lb.json"
    assert main(["lowerbound", "--n", "10", "--out", str(path)]) == 0
    return path


def test_lowerbound_spec_contents(lb_spec):
    spec = json.loads(lb_spec.read_text())
    assert spec["region"] == {"kind": "simplex", "n": 10}
    assert spec["f_star"] == 0.1
    assert spec["x0"] == {"vertex_index": 0}


def test_solve_short_step(lb_spec, tmp_path):
    out = tmp_path / "t.csv"
    assert main(["solve", str(lb_spec), "--step", "short:2", "--max-iter", "100", "--out", str(out)]) == 0
    assert out.read_text().splitlines()[0] == ",".join(CSV_HEADER)
    rows = _rows(out)
    assert abs(float(rows[9]["f"]) - 0.1) <= 1e-12
    assert len(rows) == 10


def test_solve_epsilon_stops_early(tmp_path):
    spec = tmp_path / "s.json"
    spec.write_text(json.dumps({"region": {"kind": "box", "n": 2, "lo": 0, "hi": 1},
                                "objective": {"kind": "distance_squared", "p": [0.3, 0.6]},
                                "x0": [0.0, 0.0]}))
    out = tmp_path / "t.csv"
    assert main(["solve", str(spec), "--epsilon", "1e-6", "--max-iter", "100000",
                 "--out", str(out)]) == 0
    rows = _rows(out)
    assert float(rows[-1]["fw_gap"]) <= 1e-6 and len(rows) < 100001


def test_solve_is_byte_identical(lb_spec, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        assert main(["solve", str(lb_spec), "--step", "adaptive", "--max-iter", "200",
                     "--out", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_compare_deterministic_and_wide(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        assert main(["--seed", "7", "compare", "builtin:ksparse:30:4:1", "--rules",
                     "open2,short:2,adaptive", "--max-iter", "100", "--out", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()
    header = a.read_text().splitlines()[0].split(",")
    assert header[0] == "t"
    assert [h for h in header if h.endswith(":fw_gap")] == [
        "open2:fw_gap", "short:2:fw_gap", "adaptive:fw_gap"]


def test_compare_open_ell_sweep(lb_spec, tmp_path):
    out = tmp_path / "w.csv"
    assert main(["compare", str(lb_spec), "--rules", "open-ell:1,open-ell:2,open-ell:4,open-ell:8",
                 "--max-iter", "50", "--out", str(out)]) == 0
    header = out.read_text().splitlines()[0].split(",")
    assert len([h for h in header if h.endswith(":fw_gap")]) == 4


def test_compare_single_rule_matches_solve(lb_spec, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["compare", str(lb_spec), "--rules", "short:2", "--out", str(a)]) == 0
    assert main(["solve", str(lb_spec), "--step", "short:2", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_seed_changes_random_instance(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["--seed", "1", "solve", "builtin:ksparse:20:3:1", "--max-iter", "5", "--out", str(a)])
    main(["--seed", "2", "solve", "builtin:ksparse:20:3:1", "--max-iter", "5", "--out", str(b)])
    assert a.read_bytes() != b.read_bytes()


def test_env_seed(tmp_path, monkeypatch):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["--seed", "5", "solve", "builtin:ksparse:20:3:1", "--max-iter", "5", "--out", str(a)])
    monkeypatch.setenv("FWKIT_SEED", "5")
    main(["solve", "builtin:ksparse:20:3:1", "--max-iter", "5", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_certify_pass(lb_spec, tmp_path):
    trace = tmp_path / "t.csv"
    report = tmp_path / "r.json"
    assert main(["solve", str(lb_spec), "--max-iter", "2000", "--out", str(trace)]) == 0
    code = main(["certify", str(lb_spec), str(trace), "--which",
                 "primal-rate,dual-rate,lower-bound,convexity,smoothness,optimality",
                 "--out", str(report)])
    assert code == 0
    bundle = json.loads(report.read_text())
    assert bundle["passed"] and len(bundle["reports"]) == 6


def test_certify_wrong_L_fails(lb_spec, tmp_path):
    trace = tmp_path / "t.csv"
    main(["solve", str(lb_spec), "--max-iter", "20", "--out", str(trace)])
    spec = json.loads(lb_spec.read_text())
    spec["objective"]["L"] = 1.0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(spec))
    assert main(["certify", str(bad), str(trace), "--which", "smoothness",
                 "--out", str(tmp_path / "r.json")]) == 1


def test_certify_mismatched_trace(lb_spec, tmp_path):
    other = tmp_path / "o.json"
    main(["lowerbound", "--n", "10", "--shifted", "--out", str(other)])
    trace = tmp_path / "t.csv"
    main(["solve", str(other), "--max-iter", "20", "--out", str(trace)])
    assert main(["certify", str(lb_spec), str(trace), "--out", str(tmp_path / "r.json")]) == 2


def test_bad_inputs_exit_2(tmp_path, lb_spec):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["solve", str(bad)]) == 2
    assert main(["solve", str(lb_spec), "--step", "bogus"]) == 2
    assert main(["solve", str(tmp_path / "missing.json")]) == 2
    infeasible = tmp_path / "inf.json"
    infeasible.write_text(json.dumps({"region": {"kind": "simplex", "n": 2},
                                      "objective": {"kind": "distance_squared"},
                                      "x0": [1.0, 1.0]}))
    assert main(["solve", str(infeasible)]) == 2


def test_solver_error_exit_3(tmp_path):
    spec = tmp_path / "s.json"
    spec.write_text(json.dumps({"region": {"kind": "simplex", "n": 10},
                                "objective": {"kind": "distance_squared", "p": "uniform"},
                                "x0": {"vertex_index": 0}}))
    out = tmp_path / "c.json"
    code = main(["caratheodory", "--spec", str(spec), "--epsilon", "1e-6", "--max-iter", "3",
                 "--out", str(out)])
    assert code == 3
    assert "error" in json.loads(out.read_text())


def test_caratheodory_cli(tmp_path):
    out = tmp_path / "c.json"
    assert main(["caratheodory", "--region", "simplex:100", "--target", "uniform",
                 "--epsilon", "0.1", "--out", str(out)]) == 0
    d = json.loads(out.read_text())
    assert d["cardinality"] <= 801 and d["error"] <= 0.1


def test_separate_cli(tmp_path):
    out = tmp_path / "s.json"
    assert main(["separate", "--region", "simplex:2", "--point", "1,1", "--epsilon", "0.1",
                 "--out", str(out)]) == 0
    d = json.loads(out.read_text())
    assert d["kind"] == "hyperplane" and d["point_value"] < d["offset"]
    assert main(["separate", "--region", "simplex:3", "--point", "uniform", "--epsilon", "0.1",
                 "--out", str(out)]) == 0
    assert json.loads(out.read_text())["kind"] == "membership"


def test_separate_undecided_exit_4(tmp_path):
    out = tmp_path / "s.json"
    code = main(["separate", "--region", "simplex:2", "--point", "0.52,0.52", "--epsilon", "0.01",
                 "--max-iter", "1", "--step", "fixed:0.0001", "--out", str(out)])
    assert code == 4
    assert json.loads(out.read_text())["kind"] == "undecided"


def test_console_entry_point(lb_spec):
    res = subprocess.run([sys.executable, "-m", "fwkit.cli", "solve", str(lb_spec), "--max-iter", "3"],
                         capture_output=True, text=True, check=True)
    rows = list(csv.reader(io.StringIO(res.stdout)))
    assert tuple(rows[0]) == CSV_HEADER and len(rows) == 5
