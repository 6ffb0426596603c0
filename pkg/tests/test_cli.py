import csv
import difflib
import io
import json
from importlib import resources

import numpy as np
import pytest

from loopspam.cli import EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME, main, sweep_rows
from loopspam.config import load_config, parse_angle, parse_config, parse_counts, parse_setting
from loopspam.errors import ConfigError
from loopspam.report import run_scenario, strip_timestamp, to_json
from loopspam.simulator import EXACT


def bundled(name):
    return (resources.files("loopspam") / "configs" / f"{name}.cfg").read_text()


@pytest.mark.parametrize("text, value", [
    ("pi/8", np.pi / 8),
    ("-pi/16", -np.pi / 16),
    ("3*pi/16", 3 * np.pi / 16),
    ("0", 0.0),
    ("0.3927", 0.3927),
    ("22.5deg", np.pi / 8),
    (" - pi / 4 ", -np.pi / 4),
])
def test_parse_angle(text, value):
    assert parse_angle(text) == pytest.approx(value, abs=1e-15)


@pytest.mark.parametrize("text", ["", "pi pi", "abc", "pi/8deg", "1/"])
def test_parse_angle_rejects(text):
    with pytest.raises(ValueError):
        parse_angle(text)


def test_parse_setting_and_counts():
    s = parse_setting("-pi/8, -pi/16")
    assert (s.q, s.h) == pytest.approx((-np.pi / 8, -np.pi / 16))
    assert parse_counts("exact") == EXACT
    assert parse_counts("14000") == 14000
    with pytest.raises(ValueError):
        parse_counts("lots")


def test_bundled_configs_differ_only_in_cheat_policy():
    diff = [line for line in difflib.unified_diff(
        bundled("honest").splitlines(), bundled("cheat").splitlines(), lineterm="", n=0)
        if line[:1] in "+-" and not line.startswith(("+++", "---"))]
    assert diff == ["-policy = none", "+policy = paper"]


def test_bundled_config_contents():
    honest = load_config("honest")
    assert (honest.state.p_s, honest.state.p_w) == (0.928, 0.628)
    assert honest.plan.counts_per_pair == 14000 and honest.plan.trials == 10
    assert honest.policy.honest
    assert not load_config("cheat").policy.honest
    assert load_config("bell").state.p_w == 1.0


def test_config_errors_name_the_field():
    text = bundled("honest").replace("p_w = 0.628", "p_w = 1.5")
    with pytest.raises(ConfigError, match="state"):
        parse_config(text, "x.cfg")
    text = bundled("honest").replace("trials = 10", "trials = ten")
    with pytest.raises(ConfigError, match=r"plan\.trials"):
        parse_config(text, "x.cfg")
    text = bundled("honest").replace("trials = 10", "trials = 1")
    with pytest.raises(ConfigError, match="plan"):
        parse_config(text, "x.cfg")
    with pytest.raises(ConfigError):
        parse_config("[state\np_s = 1", "bad.cfg")
    with pytest.raises(ConfigError, match="rules"):
        parse_config("[cheat]\npolicy = rules\n")


def test_custom_rules_section():
    cfg = parse_config("[cheat]\npolicy = rules\n[cheat.rules]\n0,1 = 0, 0\n2,3 = pi/4, pi/8\n")
    assert set(cfg.policy.rules) == {(0, 1), (2, 3)}


def run_cli(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_run_writes_json_report(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, stdout, _ = run_cli(["run", "--config", "cheat", "--out", str(out)], capsys)
    assert code == EXIT_OK
    report = json.loads(out.read_text())
    for key in ("software", "generated_at", "seed", "config", "chsh", "delta", "verdict",
                "characterization"):
        assert key in report
    assert report["verdict"]["detected"]
    assert report["seed"] == 20180207
    assert report["chsh"]["mean"] == pytest.approx(2.42, abs=0.05)
    assert "DETECTED" in stdout
    assert "clip_magnitude" in report["characterization"]


def test_run_reports_are_reproducible(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json", tmp_path / "c.json"]
    run_cli(["run", "--seed", "77", "--out", str(paths[0])], capsys)
    run_cli(["run", "--seed", "77", "--out", str(paths[1])], capsys)
    run_cli(["run", "--seed", "77", "--workers", "4", "--out", str(paths[2])], capsys)
    texts = [strip_timestamp(p.read_text()) for p in paths]
    assert texts[0] == texts[1] == texts[2]


def test_run_csv_and_stdout(capsys):
    code, stdout, err = run_cli(["run", "--format", "csv", "--trials", "4"], capsys)
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(stdout)))
    assert len(rows) == 9 and set(rows[0]) == {"row", "col", "mean", "std", "ratio"}
    assert "false correlations" in err


def test_run_exact_mode_serializes_infinite_ratios(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _, _ = run_cli(["run", "--cheat", "paper", "--counts", "exact", "--out", str(out)],
                         capsys)
    assert code == EXIT_OK
    text = out.read_text()
    assert "Infinity" not in text and "NaN" not in text
    report = json.loads(text)
    assert "inf" in report["delta"]["ratio"][0]
    assert report["verdict"]["detected"]


def test_run_cheat_rules_file(tmp_path, capsys):
    rules = tmp_path / "rules.cfg"
    rules.write_text("[cheat.rules]\n0,0 = 0, 0\n0,1 = 0, 0\n1,0 = pi/4, pi/8\n"
                     "1,1 = -pi/4, -pi/8\n")
    out = tmp_path / "r.json"
    code, _, _ = run_cli(["run", "--cheat", str(rules), "--out", str(out)], capsys)
    assert code == EXIT_OK
    assert json.loads(out.read_text())["verdict"]["detected"]


@pytest.mark.parametrize("argv", [
    ["run", "--config", "does-not-exist.cfg"],
    ["run", "--counts", "many"],
    ["run", "--trials", "1"],
    ["run", "--threshold", "-1"],
    ["run", "--cheat", "sneaky"],
    ["sweep", "--ps", "0:2:3"],
    ["sweep", "--pw", "a:b"],
])
def test_config_errors_exit_2(argv, capsys):
    code, _, err = run_cli(argv, capsys)
    assert code == EXIT_CONFIG
    assert "config error" in err


def test_runtime_error_exit_3(tmp_path, capsys):
    cfg = tmp_path / "flat.cfg"
    # every Alice setting identical: the corner matrices are singular in every trial
    cfg.write_text("[plan]\nalice = 0, 0; 0, 0; 0, 0; 0, 0\ncounts_per_pair = exact\n")
    code, _, err = run_cli(["run", "--config", str(cfg)], capsys)
    assert code == EXIT_RUNTIME
    assert err.startswith("error:")


def test_sweep_csv(capsys):
    code, stdout, _ = run_cli(["sweep", "--ps", "0.928", "--pw", "0:1:21"], capsys)
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(stdout)))
    assert len(rows) == 21
    last = rows[-1]
    assert float(last["M"]) == pytest.approx(1 + 0.928**2, abs=1e-12)
    assert last["chsh_capable"] == "True"


def test_sweep_json_rows():
    rows = sweep_rows([0.866], [1.0, 0.5])
    assert rows[0]["S_max"] == pytest.approx(2 * np.sqrt(1 + 0.866**2))
    assert not rows[1]["chsh_capable"]


def test_characterize(capsys):
    code, stdout, err = run_cli(["characterize", "--counts", "exact"], capsys)
    assert code == EXIT_OK
    block = json.loads(stdout)["characterization"]
    assert block["negativity"] == pytest.approx(0.397, abs=1e-3)
    assert block["werner_fit"]["p_s"] == pytest.approx(0.928, abs=1e-6)
    assert "negativity N       0.3968" in err
    assert "fit p_s, p_w       0.9280, 0.6280" in err


def test_selftest_passes(capsys):
    code, stdout, _ = run_cli(["selftest"], capsys)
    assert code == EXIT_OK
    assert "FAIL" not in stdout


def test_run_scenario_report_roundtrip():
    report = run_scenario(load_config("honest"))
    assert not report["verdict"]["detected"]
    again = json.loads(to_json(report))
    assert again["chsh"]["values"] == report["chsh"]["values"]


def test_bell_config_chsh_and_m(tmp_path, capsys):
    out = tmp_path / "bell.json"
    code, _, _ = run_cli(["run", "--config", "bell", "--out", str(out)], capsys)
    assert code == EXIT_OK
    report = json.loads(out.read_text())
    assert report["chsh"]["mean"] == pytest.approx(np.sqrt(2) * 1.866, abs=0.05)
    assert report["characterization"]["m_param"] == pytest.approx(1.75, abs=0.02)
    assert not report["verdict"]["detected"]
