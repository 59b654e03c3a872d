import json
import math
import subprocess
import sys

import numpy as np
import pytest

from entropic_context import io
from entropic_context.cli import main
from entropic_context.graphs import random_jpd
from entropic_context.feasibility import FeasibilityProblem
from entropic_context.quantum import build_symmetric_pentagram


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_eval_optimum(capsys):
    code, out, _ = run(capsys, "eval", "--theta", "0.2366", "--phi", "0.1698")
    assert code == 0
    report = json.loads(out)
    assert report["entropy"]["C"] == pytest.approx(0.091, abs=1e-3)
    assert report["entropic_violation"] is True
    assert report["kcbs"]["violation"] == pytest.approx(0.049, abs=2e-3)
    assert max(report["orthogonality_residuals"]) < 1e-12


def test_eval_pentagram_from_config_file(capsys, tmp_path):
    path = tmp_path / "pentagon.json"
    path.write_text(io.dumps(io.config_to_dict(build_symmetric_pentagram())))
    code, out, _ = run(capsys, "eval", "--config", str(path))
    assert code == 0
    assert json.loads(out)["kcbs"]["sum"] == pytest.approx(math.sqrt(5), abs=1e-9)


def test_eval_trivial_point_has_no_violation(capsys):
    code, out, _ = run(capsys, "eval", "--theta", "0", "--phi", "0")
    report = json.loads(out)
    assert code == 0
    assert report["entropy"]["C"] <= 0
    assert report["entropic_violation"] is False


def test_eval_json_copy(capsys, tmp_path):
    target = tmp_path / "report.json"
    code, out, _ = run(capsys, "eval", "--pentagram", "--json", str(target))
    assert code == 0 and target.read_text() == out


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "--theta", "0.2"],
        ["eval", "--theta", "0.2", "--phi", "1.0"],
        ["eval", "--pentagram", "--theta", "0.1", "--phi", "0.1"],
        ["eval", "--config", "/nonexistent/config.json"],
        ["scan", "--res", "1"],
        ["optimize", "--restarts", "0", "--mode", "general"],
        ["sample", "--pentagram", "--shots", "0"],
    ],
)
def test_input_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert out == "" and err.startswith("error:")


def test_malformed_json_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "eval", "--config", str(bad))
    assert code == 2 and "malformed JSON" in err


def test_non_orthogonal_config_exit_3(capsys, tmp_path):
    data = io.config_to_dict(build_symmetric_pentagram())
    data["projectors"][1] = data["projectors"][0]
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(data))
    code, _, err = run(capsys, "eval", "--config", str(path))
    assert code == 3 and err.startswith("invariant violation")


def test_bad_seed_rejected_by_parser():
    with pytest.raises(SystemExit) as exc:
        main(["sample", "--pentagram", "--seed", "-1"])
    assert exc.value.code == 2


def test_scan_csv(capsys, tmp_path):
    code, out, _ = run(capsys, "scan", "--res", "5")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "theta,phi,C" and len(lines) == 26
    target = tmp_path / "grid.csv"
    code, summary, _ = run(capsys, "scan", "--res", "5", "--out", str(target))
    assert code == 0 and target.read_text() == out
    assert json.loads(summary)["nodes"] == 25


def test_scan_unwritable_path(capsys, tmp_path):
    code, _, _ = run(capsys, "scan", "--res", "3", "--out", str(tmp_path / "missing" / "g.csv"))
    assert code == 2


def test_optimize_two_param(capsys):
    code, out, _ = run(capsys, "optimize", "--res", "60")
    result = json.loads(out)
    assert code == 0 and result["converged"]
    assert result["theta"] == pytest.approx(0.2366, abs=5e-3)
    assert result["phi"] == pytest.approx(0.1698, abs=5e-3)
    assert result["C"] == pytest.approx(0.091, abs=1e-3)


def test_optimize_nonconvergence_exit_4(capsys):
    code, out, _ = run(capsys, "optimize", "--theta", "0.3", "--phi", "0.1", "--max-iter", "3")
    assert code == 4
    assert json.loads(out)["converged"] is False


def test_optimize_general(capsys):
    code, out, _ = run(capsys, "optimize", "--mode", "general", "--restarts", "6", "--seed", "2")
    assert code == 0
    assert json.loads(out)["C"] == pytest.approx(0.091, abs=1e-3)


def test_feasibility_sources(capsys, tmp_path):
    code, out, _ = run(capsys, "feasibility", "--pentagram")
    assert code == 0 and json.loads(out)["status"] == "infeasible"
    code, out, _ = run(capsys, "feasibility", "--theta", "0.2366", "--phi", "0.1698")
    assert json.loads(out)["status"] == "infeasible"

    edges = [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]
    problem = FeasibilityProblem.from_jpd(random_jpd(5, seed=4), edges)
    path = tmp_path / "marginals.json"
    path.write_text(json.dumps(problem.to_dict()))
    code, out, _ = run(capsys, "feasibility", "--marginals", str(path), "--witness")
    result = json.loads(out)
    assert code == 0 and result["status"] == "feasible"
    assert result["witness_residual"] <= 1e-7
    assert sum(result["witness"]["table"].values()) == pytest.approx(1.0)


def test_feasibility_rejects_mixed_sources(capsys, tmp_path):
    path = tmp_path / "m.json"
    path.write_text("{}")
    code, _, _ = run(capsys, "feasibility", "--marginals", str(path), "--pentagram")
    assert code == 2
    code, _, _ = run(capsys, "feasibility", "--marginals", str(path))
    assert code == 2


def test_sample(capsys):
    code, out, _ = run(capsys, "sample", "--theta", "0.2366", "--phi", "0.1698",
                       "--shots", "200000", "--seed", "7", "--resamples", "200")
    est = json.loads(out)
    assert code == 0
    assert abs(est["C_hat"] - 0.091) <= 0.01
    assert all(sum(c.values()) == 200000 for c in est["counts"])


@pytest.mark.parametrize(
    "argv",
    [
        ["sample", "--pentagram", "--shots", "5000", "--seed", "11", "--resamples", "100"],
        ["optimize", "--mode", "general", "--restarts", "2", "--seed", "5"],
        ["scan", "--res", "7"],
    ],
)
def test_byte_identical_reruns(capsys, argv):
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first == second


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "entropic_context.cli", "eval", "--pentagram"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["kcbs"]["sum"] == pytest.approx(np.sqrt(5), abs=1e-9)
