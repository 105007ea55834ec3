import json
import subprocess
import sys

import numpy as np
import pytest

from winrestart.analysis import read_csv
from winrestart.cli import main
from winrestart.config import ExperimentConfig, apply_overrides, load_config, parse_config, serialize_config
from winrestart.errors import ConfigError


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_config_round_trip():
    text = "alpha = 2.5\nbeta = 0\ngamma = 12\npolicies = none, speed\nx0 = 1, 2, 3\n# comment\n\nfit_window = 0, 1\n"
    cfg = parse_config(text)
    assert cfg.alpha == 2.5 and cfg.policies == ("none", "speed") and cfg.x0 == (1.0, 2.0, 3.0)
    once = serialize_config(cfg)
    assert serialize_config(parse_config(once)) == once
    assert parse_config(once) == cfg


def test_default_config_round_trip():
    once = serialize_config(ExperimentConfig())
    assert parse_config(once) == ExperimentConfig()


def test_config_errors_name_the_field(tmp_path):
    with pytest.raises(ConfigError, match="^alpha"):
        parse_config("alpha = three")
    with pytest.raises(ConfigError, match="^bogus"):
        parse_config("bogus = 1")
    with pytest.raises(ConfigError, match="^line 1"):
        parse_config("just words")
    with pytest.raises(ConfigError, match="^gamma"):
        ExperimentConfig(gamma=1.0, gamma_eps=0.1).validate()
    with pytest.raises(ConfigError, match="^config"):
        load_config(tmp_path / "missing.cfg")


def test_overrides_win(tmp_path):
    p = tmp_path / "a.cfg"
    p.write_text("alpha = 2\n")
    cfg = apply_overrides(load_config(p), ["alpha=4", ("beta", "1")])
    assert (cfg.alpha, cfg.beta) == (4.0, 1.0)


def test_initial_point():
    assert np.array_equal(ExperimentConfig().initial_point(), np.ones(3))
    a = ExperimentConfig(x0_random=True, seed=3).initial_point()
    b = ExperimentConfig(x0_random=True, seed=3).initial_point()
    assert np.array_equal(a, b) and np.all(np.abs(a) <= 2)


def test_simulate_bad_eps_exit_2(capsys, tmp_path):
    code, _, err = run(capsys, "simulate", "--out", str(tmp_path), "--set", "gamma_eps=-1")
    assert code == 2
    assert "gamma_eps" in err


def test_simulate_at_origin(capsys, tmp_path):
    code, out, _ = run(capsys, "simulate", "--out", str(tmp_path), "--set", "x0=0,0,0")
    assert code == 0
    s = json.loads(out)
    assert s["status"] == "already optimal"
    assert s["restarts"] == 0


def test_simulate_writes_artifacts(capsys, tmp_path):
    code, out, _ = run(capsys, "simulate", "--out", str(tmp_path), "--set", "horizon=0.3",
                       "--set", "gamma_eps=10", "--set", "compare_unrestarted=true")
    assert code == 0
    s = json.loads(out)
    assert s["restarts"] > 0 and s["fit"]["B"] > 0
    assert s["theory"]["C"] == pytest.approx(1 / s["theory"]["Q"], rel=1e-12)
    for name in ("trajectory.csv", "unrestarted.csv", "plot.svg", "summary.json"):
        assert (tmp_path / name).exists()
    assert read_csv(tmp_path / "trajectory.csv")["restarted"].sum() == s["restarts"]


def test_simulate_csv_summary(capsys, tmp_path):
    code, out, _ = run(capsys, "simulate", "--out", str(tmp_path), "--format", "csv", "--set", "horizon=0.1")
    assert code == 0
    assert out.startswith("key,value\n")
    assert (tmp_path / "summary.csv").exists()


def test_simulate_with_config_file_and_seed(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("beta = 0\ngamma = 5\nhorizon = 0.5\n")
    code, out, _ = run(capsys, "simulate", "--config", str(cfg), "--out", str(tmp_path / "o"), "--seed", "4")
    assert code == 0
    assert json.loads(out)["gamma"] == 5.0


def test_theory_text_and_json(capsys):
    code, out, _ = run(capsys, "theory", "--alpha", "3", "--beta", "1", "--gamma", "20", "--L", "1", "--mu", "1")
    assert code == 0
    assert "tau_upper" in out and "Q" in out
    code, out, _ = run(capsys, "theory", "--alpha", "3", "--beta", "1", "--gamma", "20", "--L", "1", "--mu", "1", "--format", "json")
    d = json.loads(out)
    assert d["C"] == pytest.approx(1 / d["Q"], rel=1e-12)
    assert d["tau3"] <= 0.25 * np.arctan(2) <= d["tau_upper"]


def test_theory_twelve_digits(capsys):
    _, out, _ = run(capsys, "theory", "--alpha", "3", "--beta", "1", "--gamma", "20", "--L", "1", "--mu", "1")
    q = next(line for line in out.splitlines() if line.strip().startswith("Q ="))
    digits = q.split("=")[1].strip().lstrip("0.")
    assert len(digits) >= 11


def test_theory_mu_above_L_warns(capsys):
    code, _, err = run(capsys, "theory", "--alpha", "3", "--beta", "1", "--gamma", "20", "--L", "1", "--mu", "1.5")
    assert "warning" in err and "mu" in err


def test_theory_bad_params_exit_2(capsys):
    code, _, err = run(capsys, "theory", "--alpha", "-3", "--beta", "1", "--gamma", "20", "--L", "1", "--mu", "1")
    assert code == 2
    assert "alpha" in err


def test_discrete_zero_iterations(capsys, tmp_path):
    code, out, _ = run(capsys, "discrete", "--out", str(tmp_path), "--set", "max_iters=0", "--set", "policies=none,speed")
    assert code == 0
    assert (tmp_path / "discrete_speed.csv").read_text() == "k,f_gap,step_norm,restarted\n"
    assert json.loads(out)["policies"]["speed"]["iterations"] == 0


def test_discrete_policies(capsys, tmp_path):
    code, out, _ = run(capsys, "discrete", "--out", str(tmp_path), "--set", "policies=none,speed,warm_start")
    assert code == 0
    pol = json.loads(out)["policies"]
    assert pol["speed"]["fit"]["B"] > pol["none"]["fit"]["B"]
    assert (tmp_path / "discrete.svg").exists()


def test_discrete_divergence_reports_k(capsys, tmp_path):
    code, _, err = run(capsys, "discrete", "--out", str(tmp_path), "--set", "gamma=1e9", "--set", "h=0.5",
                       "--set", "policies=none", "--set", "max_iters=500")
    assert code == 1
    assert "k=" in err


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "winrestart", "--help"], capture_output=True, text=True)
    assert r.returncode == 0
    for cmd in ("simulate", "theory", "discrete", "reproduce-paper"):
        assert cmd in r.stdout
