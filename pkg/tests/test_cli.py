import json

import numpy as np
import pytest

from paretolqr import problems
from paretolqr.cli import main, normalize_losses, run_verify
from paretolqr.lqr import load_problem, save_problem
from paretolqr.pareto import dominance_filter


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_sys0(tmp_path, capsys):
    path = tmp_path / "sys0.json"
    save_problem(problems.sys0(), path)
    code, out, _ = run(["solve", str(path)], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["schema"] == 1
    assert rep["K"][0][0] == pytest.approx(0.0, abs=1e-14)
    assert rep["losses"][0] == pytest.approx(1.0)


def test_solve_golden(capsys):
    code, out, _ = run(["solve", "@golden"], capsys)
    assert code == 0
    assert json.loads(out)["K"][0][0] == pytest.approx(-0.61803, abs=1e-5)


def test_solve_weight(capsys):
    code, out, _ = run(["solve", "@sys2", "--weight", "0.5,0.5"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["w"] == [0.5, 0.5]
    assert rep["scalarized_loss"] == pytest.approx(rep["P"][0][0], rel=1e-8)


def test_bad_inputs(tmp_path, capsys):
    assert run(["solve", str(tmp_path / "missing.json")], capsys)[0] == 2
    assert run(["solve", "@nope"], capsys)[0] == 2
    assert run(["solve", "@sys2", "--weight", "0.9,0.9"], capsys)[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"A": [[1.0]], "B": [[0.0]], "objectives": [{"label": "x", "Q": [[1]], "R": [[1]]}]}))
    assert run(["solve", str(bad)], capsys)[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["front", "@sys2", "--epsilon", "2"])
    assert exc.value.code == 2


def test_ce_needs_mode(capsys):
    assert run(["ce", "@sys2"], capsys)[0] == 2


def test_front_rows(capsys):
    code, out, err = run(["front", "@sys2", "--epsilon", "1", "--format", "csv"], capsys)
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 4
    assert lines[0] == "w_1,w_2,K_1_1,loss_1,loss_2,scalarized_loss,dare_residual"
    assert "points: 3" in err


def test_front_sys2_json(tmp_path, capsys):
    out = tmp_path / "front.json"
    assert run(["front", "@sys2", "--epsilon", "0.1", "--out", str(out)], capsys)[0] == 0
    rep = json.loads(out.read_text())
    losses = np.array([p["losses"] for p in rep["points"]])
    assert len(losses) == 21
    assert dominance_filter(losses, 1e-9) == list(range(21))
    assert rep["problem_digest"] == problems.sys2().digest()


def test_sensitivity_reports(capsys):
    for name in ("@sys0", "@golden", "@sys2"):
        code, out, _ = run(["sensitivity", name, "--epsilon", "0.2"], capsys)
        rep = json.loads(out)
        assert code == 0
        assert 0.8 <= rep["slope"] <= 1.2
        assert len(rep["inside_validity"]) == 3


def test_ce_modes(capsys):
    code, out, _ = run(["ce", "@sys2", "--dyn-epsilon", "0", "--epsilon", "0.2"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["sup_uniform"] <= 1e-9
    code, out, _ = run(["ce", "@sys2", "--identify", "--noise-std", "0", "--epsilon", "0.2"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["provenance"] == "identified" and rep["epsilon_dyn"] <= 1e-10


def test_demo_pendulum(tmp_path, capsys):
    out = tmp_path / "pend.csv"
    saved = tmp_path / "pend.json"
    code, _, _ = run(["demo-pendulum", "--out", str(out), "--save-problem", str(saved)], capsys)
    assert code == 0
    plot = np.loadtxt(tmp_path / "pend.plot.csv", delimiter=",", skiprows=1)
    assert plot[:, 2:].min() >= 0 and plot[:, 2:].max() <= 1
    back = load_problem(saved)
    ref = problems.pendulum()
    assert (back.n, back.d, back.m) == (ref.n, ref.d, ref.m)
    assert back.digest() == ref.digest()


def test_verify(capsys):
    code, out, _ = run(["verify"], capsys)
    assert code == 0 and out.count("PASS") == 4


def test_run_verify_detects_failure():
    checks = {name: ok for name, _, _, ok in run_verify(problems.sys2(), epsilon=1.0, step=0.002)}
    assert not checks["sufficiency_gap"]


def test_determinism(capsys):
    argv = ["ce", "@sys2", "--dyn-epsilon", "1e-3", "--seed", "7", "--epsilon", "0.2"]
    assert run(argv, capsys)[1] == run(argv, capsys)[1]


def test_normalize_losses():
    out = normalize_losses([[1.0, 5.0], [3.0, 5.0]])
    assert out.tolist() == [[0.0, 0.0], [1.0, 0.0]]
