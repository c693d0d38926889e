from __future__ import annotations

import json
import subprocess
import sys

import pytest

from normtrace.cli import main, parse_hex_list


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_spectrum_csv(capsys):
    code, out, _ = run_cli(capsys, "code", "spectrum", "--q", "2", "--r", "2", "--k", "1", "--format", "csv")
    assert code == 0
    assert out.splitlines() == ["weight,count", "0,1", "5,24", "6,12", "7,24", "8,3"]


def test_envelope_and_no_timing(capsys):
    code, out, _ = run_cli(capsys, "code", "dim", "--q", "3", "--r", "2", "--k", "2", "--no-timing")
    rep = json.loads(out)
    assert code == 0
    assert set(rep) == {"config", "results", "violations", "timing"}
    assert rep["timing"] is None
    assert rep["results"]["measured"] == 4 and rep["results"]["paper_claim"] == 3
    code, out, _ = run_cli(capsys, "code", "dim", "--q", "3", "--r", "2", "--k", "2")
    assert json.loads(out)["timing"]["workers"] == 1


def test_variety_verify_example(capsys):
    code, out, _ = run_cli(capsys, "variety", "verify", "--q", "3", "--r", "2", "--k", "2",
                           "--trials", "100", "--seed", "7")
    rep = json.loads(out)
    assert code == 0 and rep["results"]["passed"] == 100 and rep["violations"] == []


def test_conics_even_q_rejected(capsys):
    code, _, err = run_cli(capsys, "conics", "survey", "--q", "4")
    assert code == 2 and "odd" in err


@pytest.mark.parametrize("argv", [
    ("curve", "points", "--q", "6", "--r", "2"),
    ("code", "spectrum", "--q", "2", "--r", "2", "--k", "2"),
    ("field-info", "--p", "4", "--m", "1", "--r", "2"),
    ("minimal", "check", "--q", "2", "--r", "2", "--k", "1", "--message", "1,zz,0"),
    ("minimal", "check", "--q", "2", "--r", "2", "--k", "1", "--message", "0,0,0"),
    ("variety", "count", "--q", "3", "--r", "2", "--coeffs", "1,9"),
    ("code", "spectrum", "--q", "3", "--r", "2", "--k", "2", "--cap", "10"),
    ("conics", "survey", "--q", "7", "--mode", "sampled", "--samples", "5", "--validate-prop53"),
    ("bounds", "--q", "5", "--r", "2", "--k", "1", "--theorem", "lw"),
])
def test_invalid_parameters_exit_2(capsys, argv):
    assert run_cli(capsys, *argv)[0] == 2


def test_minimal_check_reports_witness(capsys):
    code, out, _ = run_cli(capsys, "minimal", "check", "--q", "2", "--r", "2", "--k", "1", "--message", "1,2,0")
    res = json.loads(out)["results"]
    assert code == 0 and res["minimal"] and res["scan_minimal"] and res["weight"] == 5
    code, out, _ = run_cli(capsys, "minimal", "check", "--q", "2", "--r", "2", "--k", "1", "--message", "1,0,0")
    res = json.loads(out)["results"]
    assert code == 0 and not res["minimal"] and "covered_codeword" in res["kernel_witness"]


def test_minimal_compare_violation_exit_1(capsys):
    # y - a with T(a) = 0 is predicted minimal but is not
    code, out, err = run_cli(capsys, "minimal", "compare", "--q", "5", "--r", "2", "--k", "4",
                             "--samples", "30", "--seed", "1", "--no-timing")
    rep = json.loads(out)
    assert code == 1 and "violation" in err
    assert len(rep["violations"]) == 8
    assert all(v["predicted"] == "class_iii" for v in rep["violations"])


def test_workers_do_not_change_bytes(capsys):
    argv = ["variety", "verify", "--q", "2", "--r", "3", "--k", "3", "--trials", "20", "--seed", "4", "--no-timing"]
    _, one, _ = run_cli(capsys, *argv)
    _, two, _ = run_cli(capsys, *argv, "--workers", "2")
    assert one == two


def test_field_info_and_points(capsys):
    code, out, _ = run_cli(capsys, "field-info", "--p", "2", "--m", "1", "--r", "2")
    res = json.loads(out)["results"]
    assert code == 0 and res["alpha"] == "2" and res["normal_basis"] == ["2", "3"]
    code, out, _ = run_cli(capsys, "curve", "points", "--q", "2", "--r", "2", "--format", "csv")
    assert code == 0 and out.splitlines()[0] == "x,y" and len(out.splitlines()) == 9


def test_bounds_report(capsys):
    code, out, _ = run_cli(capsys, "bounds", "--q", "17", "--r", "2", "--k", "1", "--trials", "3")
    rep = json.loads(out)["results"]
    assert code == 0 and rep["window"]["hypothesis_met"] and all(c["holds"] for c in rep["checks"])
    code, out, _ = run_cli(capsys, "bounds", "--q", "3", "--r", "2", "--k", "2", "--theorem", "general",
                           "--variant", "printed")
    assert code == 0 and json.loads(out)["results"]["window"]["variant"] == "printed"


def test_variety_count(capsys):
    code, out, _ = run_cli(capsys, "variety", "count", "--q", "3", "--r", "2", "--coeffs", "1,5")
    res = json.loads(out)["results"]
    assert code == 0 and res["passed"] and res["S_points"] == res["intersections"]


def test_parse_hex_list():
    assert parse_hex_list("1, a,ff") == [1, 10, 255]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "normtrace", "code", "spectrum", "--q", "2", "--r", "2",
                           "--k", "1", "--format", "csv"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("weight,count")
