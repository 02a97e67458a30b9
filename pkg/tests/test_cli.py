import json
import os
import subprocess
import sys

import pytest

from qdeform.cli import BAD_INPUT, FAILED, OK, main

DIAG = json.dumps({"coords": ["x1", "x2"], "g": [[1, 0], [0, "x1^2"]], "v": ["x2", "x1*x2 + 1"]})


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_round_trip_json(capsys):
    code, out, _ = run(capsys, "parse", "form", "e+*b^2", "--format", "json")
    assert code == OK
    payload = json.loads(out)
    assert payload["normal_form"] == "e+ * b^2"
    assert payload["round_trip"] is True


def test_grade_and_syntax_errors_exit_2(capsys):
    code, _, err = run(capsys, "parse", "form", "e+ * a")
    assert code == BAD_INPUT and "grade" in err
    code, _, err = run(capsys, "parse", "algebra", "a +* b")
    assert code == BAD_INPUT and "position 3" in err
    code, _, _ = run(capsys, "star", "e+")
    assert code == BAD_INPUT


def test_star_and_d(capsys):
    assert run(capsys, "star", "a*b*c")[1].strip() == "1/q^2*d*b*c"
    code, out, _ = run(capsys, "d", "b*c", "--q", "1/2")
    assert code == OK
    assert out.strip() == "e+ * 1/4*d*b + e- * 2*a*c"


def test_laplacian(capsys):
    code, out, _ = run(capsys, "laplacian", "b*c", "--alpha", "0", "--beta", "1")
    assert code == OK
    assert out.strip() == "(q^2 + (q^3 + q)*b*c)"


def test_eigen_exit_codes(capsys):
    code, out, _ = run(capsys, "eigen", "0-x", "--p", "1", "--format", "json")
    assert code == OK
    assert json.loads(out)["exact_zero"] is True
    code, out, _ = run(capsys, "eigen", "1-minus-d", "--n", "0", "--p", "0", "--format", "json")
    assert code == FAILED
    payload = json.loads(out)
    assert payload["observed_eigenvalue"] != payload["eigenvalue"]
    code, _, _ = run(capsys, "eigen", "1-minus-a", "--n", "1")
    assert code == BAD_INPUT


def test_harmonic(capsys):
    code, out, _ = run(capsys, "harmonic", "--degree", "2", "--bound", "2")
    assert code == OK and "dim 1" in out


def test_hodge_commands(capsys):
    assert run(capsys, "hodge", "1")[1].strip() == "e+^e- * (-i*q^2)"
    payload = json.loads(run(capsys, "hodge-solve", "--format", "json")[1])
    assert payload["alpha"] == "-q^3" and payload["beta"] == "-1/q^5"
    assert run(capsys, "hodge-verify", "--bound", "2")[0] == OK
    assert run(capsys, "hodge-verify", "--bound", "1", "--M=-i", "--N", "q^2")[0] == FAILED
    assert run(capsys, "hodge-verify", "--M=-i")[0] == BAD_INPUT
    assert run(capsys, "hodge-solve", "--K", "1")[0] == BAD_INPUT
    assert run(capsys, "inner", "1", "1")[1].strip() == "1"
    assert run(capsys, "integrate", "e+^e- * b*c")[1].strip() == "-q/(q^2 + 1)"


def test_deform_sphere(capsys):
    code, out, _ = run(capsys, "deform", "d", "b*c", "--s", "0")
    assert code == OK
    assert "dt" not in out
    code, out, _ = run(capsys, "deform", "iso", "e+ * b^2", "--s", "1", "--alpha", "1", "--beta", "0")
    assert code == OK and "dt" in out


def test_deform_classical(capsys):
    code, out, _ = run(capsys, "deform", "d", "x1^2", "--backend", "classical", "--alpha", "1/2", "--beta", "0")
    assert code == OK
    assert out.strip() == "2*x1*dx1 + dt"
    code, _, _ = run(capsys, "deform", "closed", "dx1", "0", "--backend", "classical")
    assert code == OK
    code, _, _ = run(capsys, "deform", "closed", "x2*dx1", "0", "--backend", "classical")
    assert code == FAILED
    code, _, err = run(capsys, "deform", "closed", "dx", "0", "--backend", "classical")
    assert code == BAD_INPUT and "coordinates" in err
    assert run(capsys, "deform", "closed", "dx1", "--backend", "classical")[0] == BAD_INPUT
    assert run(capsys, "deform", "closed", "e+", "0")[0] == BAD_INPUT


def test_deform_axioms(capsys):
    code, out, _ = run(capsys, "deform", "axioms", "--backend", "classical", "--samples", "5", "--format", "json")
    assert code == OK and json.loads(out)["passed"] is True


def test_classical_commands(capsys, tmp_path):
    cfg = tmp_path / "m.json"
    cfg.write_text(DIAG)
    assert run(capsys, "classical", "laplace-check", "--config", str(cfg), "--f", "x1^3*x2")[0] == OK
    code, out, _ = run(capsys, "classical", "ito", "--config", DIAG, "--f", "x1*x2", "--h", "x2", "--format", "json")
    assert code == OK and json.loads(out)["passed"] is True
    # a non-gradient drift: not closed, and kappa is nonzero
    code, out, _ = run(capsys, "classical", "girsanov", "--config", DIAG, "--format", "json")
    assert code == FAILED
    payload = json.loads(out)
    assert payload["structure"] == "0" and payload["kappa"] == payload["kappa_display"] != "0"
    assert run(capsys, "classical", "nabla", "--config", DIAG)[0] == OK
    assert run(capsys, "classical", "ito", "--config", str(tmp_path / "missing.json"))[0] == BAD_INPUT
    assert run(capsys, "classical", "ito", "--config", "{not json")[0] == BAD_INPUT


def test_suite_command(capsys):
    code, out, _ = run(capsys, "suite", "--list")
    assert code == OK and "hodge-codiff" in out.split()
    code, out, _ = run(capsys, "suite", "qsl2-relations", "--format", "json")
    assert code == OK
    assert json.loads(out)["passed"] is True
    assert "wall_time" not in json.loads(out)
    assert run(capsys, "suite", "eigen-1")[0] == FAILED
    assert run(capsys, "suite", "no-such-suite")[0] == BAD_INPUT
    assert run(capsys, "--suite", "d-prop")[0] == OK


def test_suite_reports_are_stable(capsys):
    a = run(capsys, "suite", "girsanov", "--format", "json", "--seed", "3")[1]
    b = run(capsys, "suite", "girsanov", "--format", "json", "--seed", "3")[1]
    assert a == b


def test_timing_flag(capsys):
    out = run(capsys, "--timing", "suite", "qsl2-relations", "--format", "json")[1]
    assert "wall_time" in json.loads(out)


def test_no_command_prints_help(capsys):
    code, out, _ = run(capsys)
    assert code == BAD_INPUT and "usage" in out


def _sub(*argv, fault=None):
    env = {k: v for k, v in os.environ.items() if k != "QDEFORM_FAULT"}
    if fault:
        env["QDEFORM_FAULT"] = fault
    return subprocess.run([sys.executable, "-m", "qdeform.cli", *argv], env=env,
                          capture_output=True, text=True, timeout=120)


@pytest.mark.parametrize("name", ["delta-props", "laplace-props", "eigen-0", "harmonic", "hodge-codiff"])
def test_injected_fault_fails_suites(name):
    assert _sub("suite", name).returncode == OK
    proc = _sub("suite", name, fault="dc-power")
    assert proc.returncode == FAILED
    assert "fault 'dc-power' is active" in proc.stderr


def test_unknown_fault_is_bad_input():
    proc = _sub("suite", "d-prop", fault="bogus")
    assert proc.returncode == BAD_INPUT
