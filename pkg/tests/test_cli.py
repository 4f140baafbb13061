import io

import numpy as np
import pytest

from hom_pulse import cli
from hom_pulse.cli import (ConfigError, RunConfig, format_number, main, parse_config,
                           read_curve_csv, run)
from hom_pulse.hom import NumericFailure

FAST = ["--theta-steps", "61", "--t-steps", "961"]


def test_defaults():
    cfg = parse_config(["g2"])
    assert (cfg.gamma, cfg.tau, cfg.horizon, cfg.theta_max, cfg.theta_steps) == (2.0, 0.2, 4.8, 3.0, 601)
    assert cfg.population_convention.value == "as_published"
    assert cfg.method == "closed_form" and not cfg.no_pulses
    spec = parse_config(["spectrum"])
    assert spec.horizon == 8.0 and spec.population_convention.value == "excited"


def test_figure_two_config():
    cfg = parse_config(["g2", "--delta1", "3.0", "--delta2", "-4.0", "--no-pulses"])
    s = cfg.scenario()
    assert (s.emitter1.delta, s.emitter2.delta) == (3.0, -4.0)
    assert not s.train.enabled


def test_figure_five_config():
    cfg = parse_config(["g2", "--tau", "0.3", "--delta1", "3.0", "--delta2", "2.0"])
    s = cfg.scenario()
    assert s.train.tau == 0.3 and s.emitter2.delta == 2.0


@pytest.mark.parametrize("argv, key", [
    (["g2", "--tau", "-1"], "tau"),
    (["g2", "--gamma", "abc"], "gamma"),
    (["g2", "--theta-steps", "2.5"], "theta_steps"),
    (["g2", "--t-max", "0"], "t_max"),
    (["spectrum", "--omega-min", "5", "--omega-max", "1"], "omega_max"),
    (["sweep", "--pairs", "3;-4"], "pairs"),
    (["g2", "--steady", "--no-pulses"], "steady"),
    (["g2", "--bogus", "1"], "--bogus"),
    (["g2", "--method", "euler"], "--method"),
])
def test_invalid_input_names_key(argv, key, capsys):
    with pytest.raises(ConfigError, match=key):
        parse_config(argv)
    assert main(argv) == 2
    assert key in capsys.readouterr().err


def test_config_file_merge_flags_win(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("# figure 5\ntau = 0.3\ndelta2=2.0  # green line\nconvention=excited\n\n")
    cfg = parse_config(["g2", "--config", str(conf), "--delta2", "-2"])
    assert cfg.tau == 0.3 and cfg.delta2 == -2.0
    assert cfg.population_convention.value == "excited"
    assert parse_config(["g2"], file=str(conf)).delta2 == 2.0


@pytest.mark.parametrize("body, key", [("taux = 1", "taux"), ("tau = fast", "tau"),
                                       ("no_pulses = maybe", "no_pulses"),
                                       ("method = rk4", "method")])
def test_config_file_errors(tmp_path, body, key):
    conf = tmp_path / "bad.conf"
    conf.write_text(body + "\n")
    with pytest.raises(ConfigError, match=key):
        parse_config(["g2", "--config", str(conf)])


def test_format_number():
    assert format_number(0.0) == "0"
    assert format_number(1 / 3) == "0.333333333333"
    assert format_number(1.5e-7) == "0.00000015"
    assert "e" not in format_number(1.234e-13)


def test_g2_csv_and_round_trip(tmp_path):
    out = tmp_path / "g2.csv"
    assert main(["g2", "--out", str(out)]) == 0
    header, theta, g2 = read_curve_csv(out)
    assert header == "theta,g2"
    assert len(theta) == 601 and g2[0] == 0
    text = out.read_text()
    assert text.endswith("\n")
    rewritten = "\n".join([header] + [f"{format_number(a)},{format_number(b)}"
                                      for a, b in zip(theta, g2)]) + "\n"
    assert rewritten == text


def test_output_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert main(["g2", "--no-pulses", *FAST, "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_sweep_writes_one_file_per_pair(tmp_path):
    out = tmp_path / "fig4.csv"
    buf = io.StringIO()
    cfg = parse_config(["sweep", "--pairs", "3:-4,3:-2,3:2", "--tau", "0.2", *FAST,
                        "--out", str(out)])
    assert run(cfg, stdout=buf) == 0
    files = sorted(p.name for p in tmp_path.iterdir())
    assert files == ["fig4_3_-2.csv", "fig4_3_-4.csv", "fig4_3_2.csv"]
    summary = buf.getvalue()
    assert "3:-4 vs 3:-2" in summary and "3:-4 vs 3:2" in summary and "3:-2 vs 3:2" in summary
    assert "max/peak" in summary


def test_spectrum_command(tmp_path):
    out = tmp_path / "spec.csv"
    assert main(["spectrum", "--no-pulses", "--delta", "3", "--out", str(out)]) == 0
    header, omega, intensity = read_curve_csv(out)
    assert header == "omega,intensity"
    step = omega[1] - omega[0]
    assert abs(omega[np.argmax(intensity)] - 3.0) <= step + 1e-12


def test_steady_and_qrt_options(tmp_path):
    out = tmp_path / "x.csv"
    assert main(["g2", "--steady", *FAST, "--out", str(out)]) == 0
    assert main(["g2", "--method", "qrt-numeric", *FAST, "--out", str(out)]) == 0
    assert read_curve_csv(out)[2][0] == 0


def test_unwritable_output_exits_2(tmp_path):
    assert main(["g2", *FAST, "--out", str(tmp_path / "missing" / "g2.csv")]) == 2


def test_numeric_failure_exits_3(tmp_path, monkeypatch):
    def boom(scenario):
        raise NumericFailure("G2_34 went negative")
    monkeypatch.setattr(cli, "g2_34_integrated", boom)
    assert main(["g2", "--out", str(tmp_path / "g2.csv")]) == 3


def test_runconfig_scenario_overrides():
    cfg = RunConfig(command="sweep")
    s = cfg.scenario(1.0, -1.0)
    assert (s.emitter1.delta, s.emitter2.delta, s.T) == (1.0, -1.0, 4.8)
