"""Command-line behavior: outputs, exit codes, error mapping."""

import json

import numpy as np
import pytest

from manreg import TraceLog, circle, scenario_to_dict, Scenario, ReducedState
from manreg.cli import entry


def _write_config(tmp_path, sc, name="config.json", drop_mode=False):
    d = scenario_to_dict(sc)
    if drop_mode:
        del d["mode"]
    path = tmp_path / name
    path.write_text(json.dumps(d))
    return path


@pytest.fixture()
def short_scenario():
    return Scenario(name="cli-short", mode="regulation",
                    maneuver=circle(radius=0.25, speed=0.1), duration=3.0)


def test_sim_writes_trace_and_summary(tmp_path, short_scenario, capsys):
    cfg = _write_config(tmp_path, short_scenario)
    out = tmp_path / "run"
    assert entry(["sim", "--config", str(cfg), "--out", str(out)]) == 0
    trace = TraceLog.read_csv(out / "trace.csv")
    assert len(trace) == 301
    summary = json.loads((out / "summary.json").read_text())
    assert summary["mode"] == "regulation" and not summary["diverged"]
    assert "peak_speed" in summary["metrics"]
    # the same summary is echoed to stdout
    assert json.loads(capsys.readouterr().out) == summary


def test_sim_without_out_prints_only(tmp_path, short_scenario, capsys):
    cfg = _write_config(tmp_path, short_scenario)
    assert entry(["sim", "--config", str(cfg)]) == 0
    assert json.loads(capsys.readouterr().out)["name"] == "cli-short"


def test_sim_diverged_exits_2(tmp_path, capsys):
    sc = Scenario(name="cli-runaway", mode="tracking",
                  maneuver=circle(radius=0.25, speed=0.1), duration=5.0,
                  initial_state=ReducedState(p=[30.0, 0.0, -1.0],
                                             v=np.zeros(3), psi=0.0))
    cfg = _write_config(tmp_path, sc)
    assert entry(["sim", "--config", str(cfg)]) == 2
    assert json.loads(capsys.readouterr().out)["diverged"] is True


def test_sim_config_errors_exit_1(tmp_path, short_scenario, capsys):
    missing = tmp_path / "nope.json"
    assert entry(["sim", "--config", str(missing)]) == 1

    garbled = tmp_path / "garbled.json"
    garbled.write_text("{not json")
    assert entry(["sim", "--config", str(garbled)]) == 1

    d = scenario_to_dict(short_scenario)
    d["schema_version"] = 99
    stale = tmp_path / "stale.json"
    stale.write_text(json.dumps(d))
    assert entry(["sim", "--config", str(stale)]) == 1
    assert "error" in capsys.readouterr().err


def test_compare_writes_both_traces(tmp_path, short_scenario, capsys):
    cfg = _write_config(tmp_path, short_scenario, drop_mode=True)
    out = tmp_path / "cmp"
    assert entry(["compare", "--config", str(cfg), "--out", str(out)]) == 0
    assert len(TraceLog.read_csv(out / "tracking.csv")) == 301
    assert len(TraceLog.read_csv(out / "regulation.csv")) == 301
    summary = json.loads((out / "summary.json").read_text())
    assert set(summary["ratios"]) == {"peak_speed", "peak_thrust",
                                      "max_path_deviation"}
    capsys.readouterr()


def test_compare_rejects_mode_fixing_config(tmp_path, short_scenario, capsys):
    cfg = _write_config(tmp_path, short_scenario)  # mode present
    assert entry(["compare", "--config", str(cfg)]) == 1
    assert "mode" in capsys.readouterr().err


def test_certify_prints_certificate(capsys):
    assert entry(["certify"]) == 0
    cert = json.loads(capsys.readouterr().out)
    assert cert["residual"] < 1e-9
    P = np.asarray(cert["P"])
    assert P.shape == (7, 7)
    assert np.allclose(P, P.T)


def test_certify_flags_and_out_file(tmp_path, capsys):
    out = tmp_path / "cert.json"
    rc = entry(["certify", "--k-p", "4", "--k-d", "4", "--out", str(out)])
    assert rc == 0
    cert = json.loads(out.read_text())
    assert cert["gains"]["k_p"] == 4.0 and cert["gains"]["k_d"] == 4.0
    capsys.readouterr()


def test_certify_integral_augmentation(capsys):
    rc = entry(["certify", "--k-p", "4", "--k-d", "4", "--k-i", "1",
                "--integral"])
    assert rc == 0
    cert = json.loads(capsys.readouterr().out)
    assert np.asarray(cert["P"]).shape == (10, 10)
    assert cert["with_integral"] is True


def test_certify_unstable_gains_exit_1(capsys):
    # k_i above the k_p*k_d product leaves the loop unstable
    rc = entry(["certify", "--k-p", "16", "--k-d", "8", "--k-i", "129",
                "--integral"])
    assert rc == 1
    assert "error" in capsys.readouterr().err


def test_certify_bad_config_exit_1(tmp_path, capsys):
    cfg = tmp_path / "cert.json"
    cfg.write_text(json.dumps({"gains": {"k_q": 1.0}}))
    assert entry(["certify", "--config", str(cfg)]) == 1
    capsys.readouterr()


def test_plotdata_emits_all_panels(tmp_path, short_scenario, capsys):
    cfg = _write_config(tmp_path, short_scenario)
    run_dir = tmp_path / "run"
    assert entry(["sim", "--config", str(cfg), "--out", str(run_dir)]) == 0
    capsys.readouterr()

    panel_dir = tmp_path / "panels"
    rc = entry(["plotdata", "--trace", str(run_dir / "trace.csv"),
                "--out", str(panel_dir)])
    assert rc == 0
    expected = {"path.csv", "positions.csv", "roll.csv", "pitch.csv",
                "thrust.csv", "tau.csv", "speed.csv"}
    assert {p.name for p in panel_dir.iterdir()} == expected
    assert json.loads(capsys.readouterr().out)["written"] == sorted(expected)

    speed_lines = (panel_dir / "speed.csv").read_text().splitlines()
    assert speed_lines[0] == "t,speed,speed_d"
    assert len(speed_lines) == 302  # header + one row per trace step


def test_plotdata_rejects_stale_schema(tmp_path, short_scenario, capsys):
    cfg = _write_config(tmp_path, short_scenario)
    run_dir = tmp_path / "run"
    entry(["sim", "--config", str(cfg), "--out", str(run_dir)])
    capsys.readouterr()

    lines = (run_dir / "trace.csv").read_text().splitlines()
    stale = tmp_path / "stale.csv"
    stale.write_text("\n".join(["# schema_version: 99"] + lines[1:]) + "\n")
    rc = entry(["plotdata", "--trace", str(stale),
                "--out", str(tmp_path / "p")])
    assert rc == 1
    assert "schema_version" in capsys.readouterr().err


def test_usage_errors_exit_1(capsys):
    with pytest.raises(SystemExit) as exc:
        entry(["sim"])  # --config is required
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        entry(["frobnicate"])
    assert exc.value.code == 1
    capsys.readouterr()
