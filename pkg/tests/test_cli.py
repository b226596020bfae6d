import json

from ringform.cli import main

BAD_SUM_CONFIG = """
[formation]
d = [3.14159, 3.14159, 3.14159]
R = [1.0, 1.0, 1.0]
"""

DIVERGING_CONFIG = """
[formation]
n = 4
d = "equal"
R = 1.0
omega = 1.0

[sim]
dt = 100.0
t_end = 10000.0
"""

SHORT_CONFIG = """
[formation]
n = 6
d = "equal"
R = [0.6, 1.5, 0.6, 1.5, 0.6, 1.5]
omega = 1.0

[target]
kind = "constant-velocity"
velocity = [0.05, 0.03]

[sim]
dt = 0.001
t_end = 2.0
seed = 0
store_every = 10
"""


def test_run_writes_all_outputs(tmp_path, capsys):
    cfg = tmp_path / "short.toml"
    cfg.write_text(SHORT_CONFIG)
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    for name in ("trajectory.csv", "metrics.csv", "report.json", "trajectory.svg", "metrics.svg"):
        assert (out / name).exists(), name
    report = json.loads((out / "report.json").read_text())
    assert report["n_agents"] == 6
    header = (out / "trajectory.csv").read_text().splitlines()[0]
    assert len(header.split(",")) == 1 + 6 * 6 + 2


def test_run_invalid_config_exits_2(tmp_path, capsys):
    cfg = tmp_path / "bad.toml"
    cfg.write_text(BAD_SUM_CONFIG)
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    assert "sum" in capsys.readouterr().err


def test_run_divergence_exits_3(tmp_path, capsys):
    cfg = tmp_path / "explode.toml"
    cfg.write_text(DIVERGING_CONFIG)
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 3
    err = capsys.readouterr().err
    assert "step" in err


def test_run_missing_config_exits_2(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "nope.toml"), "--out", str(tmp_path)]) == 2


def test_reruns_are_byte_identical(tmp_path):
    cfg = tmp_path / "short.toml"
    cfg.write_text(SHORT_CONFIG)
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
        outs.append(out)
    for fname in ("trajectory.csv", "metrics.csv", "report.json"):
        assert (outs[0] / fname).read_bytes() == (outs[1] / fname).read_bytes(), fname


def test_seed_override_changes_output(tmp_path):
    cfg = tmp_path / "short.toml"
    cfg.write_text(SHORT_CONFIG)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", "--config", str(cfg), "--out", str(a)]) == 0
    assert main(["run", "--config", str(cfg), "--out", str(b), "--seed", "5"]) == 0
    assert (a / "trajectory.csv").read_bytes() != (b / "trajectory.csv").read_bytes()


def test_bundled_config_with_short_override(tmp_path):
    out = tmp_path / "o"
    assert main(["run", "--config", "example1", "--out", str(out), "--t-end", "1.0"]) == 0
    assert (out / "report.json").exists()


def test_analyze_spectrum_equal_four(capsys):
    assert main(["analyze-spectrum", "--d", "equal", "--n", "4"]) == 0
    out = capsys.readouterr().out
    assert "zero simple" in out
    assert "pass" in out
    assert "N even" in out


def test_analyze_spectrum_odd_count(capsys):
    assert main(["analyze-spectrum", "--d", "equal", "--n", "3"]) == 0
    out = capsys.readouterr().out
    assert "absent" in out
    assert "N odd" in out


def test_analyze_spectrum_inadmissible_exits_2(capsys):
    assert main(["analyze-spectrum", "--d", "1.0,1.0,1.0"]) == 2
    assert "sum" in capsys.readouterr().err


def test_stability_command_circling(capsys):
    assert main(["stability", "--omega", "1.0", "--mu", "1.0", "--R", "1.0", "--sigma", "0.0"]) == 0
    out = capsys.readouterr().out
    assert "verdict: stable" in out
    assert "sign changes (right-half-plane roots): 2" in out


def test_stability_command_resting(capsys):
    assert main(["stability", "--omega", "0.0", "--sigma", "-1.0"]) == 0
    out = capsys.readouterr().out
    assert "resting equilibrium" in out
    assert "verdict: stable" in out


def test_stability_rejects_bad_mu(capsys):
    assert main(["stability", "--omega", "1.0", "--mu", "-1.0"]) == 2
