import json
import subprocess
import sys

import pytest

from lzcontrol import ControlField, TimeGrid
from lzcontrol.artifacts import write_control_csv
from lzcontrol.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def files(path):
    return {p.name: p.read_bytes() for p in sorted(path.iterdir())}


@pytest.fixture(scope="module")
def dp_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("dp")
    assert main(["synth-dp", "--target", "z_pi_2", "--out", str(out)]) == 0
    return out


def test_synth_dp(dp_dir):
    metrics = json.loads((dp_dir / "metrics.json").read_text())
    assert metrics["eta_r_norm"] < 1e-7
    assert metrics["delta"] < 1e-7
    assert len(metrics["eta"]) == 5
    assert (dp_dir / "control.csv").read_text().startswith("t,C\n")
    echo = json.loads((dp_dir / "config.echo.json").read_text())
    assert echo["samples"] == 1024 and echo["shape_p"] == 1.0


def test_optimize_oct(tmp_path, capsys):
    code, out, _ = run(capsys, "optimize-oct", "--target", "z_pi", "--epsilon0", 2, "--out", tmp_path)
    assert code == 0
    metrics = json.loads((tmp_path / "metrics.json").read_text())
    assert metrics["delta"] < 1e-6
    assert json.loads(out)["delta"] == metrics["delta"]
    history = (tmp_path / "history.csv").read_text().splitlines()
    assert history[0] == "iter,J,delta,eta_r_norm"
    assert len(history) == metrics["iters"] + 2
    echo = json.loads((tmp_path / "config.echo.json").read_text())
    assert echo["alpha"] == 1e-6 and echo["beta"] == 1.0 and echo["step_rule"] == "grow"


def test_outputs_are_byte_identical(tmp_path, capsys):
    args = ["optimize-oct", "--target", "z_pi_2", "--epsilon0", 1, "--samples", 256,
            "--max-iters", 50]
    run(capsys, *args, "--out", tmp_path / "a")
    first = files(tmp_path / "a")
    run(capsys, *args, "--out", tmp_path / "a")
    assert files(tmp_path / "a") == first
    run(capsys, *args, "--out", tmp_path / "b")
    second = files(tmp_path / "b")
    for name in ("control.csv", "history.csv", "metrics.json"):
        assert first[name] == second[name]


def test_sweep(dp_dir, tmp_path, capsys):
    code, _, _ = run(capsys, "sweep", "--control", dp_dir / "control.csv", "--target", "z_pi_2",
                     "--min", 0, "--max", 6, "--res", 0.01, "--epsilon0", 0, "--out", tmp_path)
    assert code == 0
    rows = (tmp_path / "sweep.csv").read_text().splitlines()
    assert rows[0] == "epsilon,delta" and len(rows) == 602
    metrics = json.loads((tmp_path / "metrics.json").read_text())
    assert metrics["points"] == 601 and metrics["robustness"] > 0


def test_sweep_workers_do_not_change_bytes(dp_dir, tmp_path, capsys):
    base = ["sweep", "--control", dp_dir / "control.csv", "--min", 1, "--max", 2, "--res", 0.05]
    run(capsys, *base, "--out", tmp_path / "one")
    run(capsys, *base, "--workers", 3, "--out", tmp_path / "three")
    assert (tmp_path / "one" / "sweep.csv").read_bytes() == (tmp_path / "three" / "sweep.csv").read_bytes()


def test_hybrid_and_ensemble(dp_dir, tmp_path, capsys):
    hyb = tmp_path / "hyb"
    code, _, _ = run(capsys, "optimize-hybrid", "--target", "z_pi_2", "--epsilon0", 2,
                     "--initial", dp_dir / "control.csv", "--max-iters", 100, "--out", hyb)
    assert code == 0
    metrics = json.loads((hyb / "metrics.json").read_text())
    assert metrics["delta"] < metrics["initial_delta"]
    assert json.loads((hyb / "config.echo.json").read_text())["step_rule"] == "bb"
    ens = tmp_path / "ens"
    code, _, _ = run(capsys, "ensemble", "--control", hyb / "control.csv", "--initial-state", "x+",
                     "--target-state", "x-", "--out", ens)
    assert code == 0
    rows = (ens / "ensemble.csv").read_text().splitlines()
    assert rows[0] == "epsilon,fidelity,x,y,z" and len(rows) == 22
    stats = json.loads((ens / "stats.json").read_text())
    assert stats["min"] <= stats["mean"] <= stats["max"]


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"target": "z_pi", "samples": 128, "max-iters": 5, "epsilon0": 1.0}))
    code, _, _ = run(capsys, "optimize-oct", "--config", cfg, "--samples", 64, "--out", tmp_path / "o")
    assert code == 0
    echo = json.loads((tmp_path / "o" / "config.echo.json").read_text())
    assert echo["target"] == "z_pi" and echo["samples"] == 64 and echo["max_iters"] == 5
    cfg.write_text(json.dumps({"bogus": 1}))
    code, _, err = run(capsys, "optimize-oct", "--config", cfg, "--out", tmp_path / "p")
    assert code == 3 and json.loads(err)["error"] == "parse-error"


def _zero_control(path, n=64):
    write_control_csv(path, ControlField.zeros(TimeGrid(n)))
    return path


@pytest.mark.parametrize("argv,code,kind", [
    (["optimize-oct", "--samples", "-4"], 2, "invalid-argument"),
    (["optimize-oct", "--target", "y_pi"], 2, "invalid-argument"),
    (["optimize-oct", "--constraint-mode", "full"], 2, "invalid-argument"),
    (["sweep", "--control", "{tmp}/missing.csv"], 8, "io-error"),
    (["sweep", "--control", "{tmp}/bad.csv"], 3, "parse-error"),
    (["sweep", "--control", "{tmp}/skewed.csv"], 4, "grid-mismatch"),
    (["optimize-oct", "--target", "z_pi", "--samples", "64", "--initial", "{tmp}/zero.csv"],
     5, "undefined-phase"),
    (["optimize-hybrid", "--samples", "64", "--initial", "{tmp}/zero.csv"], 6, "critical-point"),
    (["synth-dp", "--max-iters", "1"], 7, "non-convergence"),
    (["optimize-oct", "--initial", "{tmp}/zero.csv"], 2, "invalid-argument"),
])
def test_error_exit_codes(tmp_path, capsys, argv, code, kind):
    (tmp_path / "bad.csv").write_text("t,C\n0.25,1\n0.75,oops\n")
    (tmp_path / "skewed.csv").write_text("t,C\n0.25,1\n0.8,2\n")
    _zero_control(tmp_path / "zero.csv")
    argv = [a.format(tmp=tmp_path) for a in argv] + ["--out", str(tmp_path / "out")]
    got, _, err = run(capsys, *argv)
    payload = json.loads(err)
    assert got == code
    assert payload["error"] == kind and payload["exit_code"] == code
    if (tmp_path / "out").is_dir():
        assert json.loads((tmp_path / "out" / "error.json").read_text()) == payload


def test_console_script(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "lzcontrol.cli", "synth-dp", "--samples", "256",
                           "--target", "z_pi", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)["eta_r_norm"] < 1e-7
