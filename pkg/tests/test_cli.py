import io
import json
import math

import numpy as np
import pandas as pd
import pytest

from main import EXIT_CONFIG, EXIT_OK, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def read_stdout_frame(out):
    return pd.read_csv(io.StringIO(out))


def simulate(tmp_path, name, *extra):
    output_dir = tmp_path / name
    code = main(
        ["simulate", "--n-traders", "30", "--seed", "4", "--set", "max_events=300", "--output-dir", str(output_dir), *extra]
    )
    return code, output_dir


def test_cauchy_value_on_stdout(capsys):
    code, out = run_cli(capsys, "analytics", "cauchy", "--u0", "1", "--t", "1", "--x", "0")
    assert code == EXIT_OK
    assert out.splitlines() == ["x,t,value", "0,1,0.318309886"]


def test_simulate_writes_outputs(tmp_path):
    code, output_dir = simulate(tmp_path, "run", "--walk-log")
    assert code == EXIT_OK
    for name in ("tape.csv", "efficiency.csv", "walk_log.csv", "manifest.json"):
        assert (output_dir / name).is_file()

    manifest = json.loads((output_dir / "manifest.json").read_text())
    assert manifest["status"] == "success"
    assert manifest["seeds"] == [4]
    assert manifest["config_snapshot"]["n_traders"] == "30"


def test_simulate_is_reproducible(tmp_path):
    simulate(tmp_path, "first")
    simulate(tmp_path, "second")
    assert (tmp_path / "first" / "tape.csv").read_bytes() == (tmp_path / "second" / "tape.csv").read_bytes()


def test_env_seed_is_overridden_by_flag(tmp_path, monkeypatch):
    monkeypatch.setenv("LEVY_AUCTION_SEED", "99")
    code = main(["simulate", "--config", "", "--n-traders", "20", "--set", "max_events=50",
                 "--output-dir", str(tmp_path / "env")])
    assert code == EXIT_OK
    assert json.loads((tmp_path / "env" / "manifest.json").read_text())["seeds"] == [99]

    simulate(tmp_path, "flag")
    assert json.loads((tmp_path / "flag" / "manifest.json").read_text())["seeds"] == [4]


def test_unknown_key_exits_with_config_error(tmp_path):
    code, output_dir = simulate(tmp_path, "bad", "--set", "gama=1.5")
    assert code == EXIT_CONFIG
    manifest = json.loads((output_dir / "manifest.json").read_text())
    assert manifest["status"] == "error"
    assert "gama" in manifest["error"]


def test_empty_sweep_grid_exits_with_config_error(tmp_path):
    code = main(["sweep", "--set", "event_rates=", "--output-dir", str(tmp_path / "sweep")])
    assert code == EXIT_CONFIG


def test_small_sweep(tmp_path):
    output_dir = tmp_path / "sweep"
    code = main(
        ["sweep", "--set", "event_rates=10", "--set", "gammas=1.5,2.5", "--set", "biases=none",
         "--trials", "2", "--n-traders", "20", "--set", "max_events=200", "--output-dir", str(output_dir)]
    )
    assert code == EXIT_OK
    summary = pd.read_csv(output_dir / "summary.csv")
    assert len(summary) == 4
    assert len(pd.read_csv(output_dir / "cells.csv")) == 2
    assert len(json.loads((output_dir / "manifest.json").read_text())["seeds"]) == 4


def tiny_sweep(tmp_path, name, *extra):
    output_dir = tmp_path / name
    code = main(
        ["sweep", *extra, "--set", "event_rates=10", "--set", "gammas=1.5", "--set", "biases=none",
         "--trials", "1", "--n-traders", "20", "--set", "max_events=100", "--output-dir", str(output_dir)]
    )
    return code, json.loads((output_dir / "manifest.json").read_text())


def test_seed_flag_overrides_config_base_seed(tmp_path):
    code, manifest = tiny_sweep(tmp_path, "flag", "--desk-scale", "--seed", "7")
    assert code == EXIT_OK
    assert manifest["seeds"] == [7]

    code, manifest = tiny_sweep(tmp_path, "file", "--desk-scale")
    assert code == EXIT_OK
    assert manifest["seeds"] == [0]


def test_explicit_base_seed_wins_over_seed_flag(tmp_path):
    code, manifest = tiny_sweep(tmp_path, "set", "--seed", "7", "--set", "base_seed=11")
    assert code == EXIT_OK
    assert manifest["seeds"] == [11]


def test_paper_grid_preset(tmp_path):
    code, manifest = tiny_sweep(tmp_path, "paper", "--paper-grid")
    assert code == EXIT_OK
    assert manifest["config_snapshot"]["trials"] == "1"
    with pytest.raises(SystemExit):
        main(["sweep", "--paper-grid", "--desk-scale"])


def test_scaling_at_origin(capsys):
    code, out = run_cli(capsys, "analytics", "scaling", "--y", "0")
    assert code == EXIT_OK
    frame = read_stdout_frame(out)
    assert frame.loc[0, "phi"] == pytest.approx(1.0 / math.pi, abs=1e-3)


def test_surface_is_monotone(capsys):
    code, out = run_cli(capsys, "analytics", "surface", "--grid", "low-latency")
    assert code == EXIT_OK
    matrix = read_stdout_frame(out).set_index("B").to_numpy()
    assert matrix.shape == (21, 50)
    assert np.all(np.diff(matrix, axis=1) > 0)
    assert np.all(np.diff(matrix, axis=0) < 0)


def test_interauction_density(capsys):
    code, out = run_cli(capsys, "analytics", "density", "--scenario", "interauction")
    assert code == EXIT_OK
    assert read_stdout_frame(out).loc[0, "factor"] == pytest.approx(0.398942, abs=1e-6)


def test_master_density_grid(capsys):
    code, out = run_cli(capsys, "analytics", "density", "--x-min", "-1", "--x-max", "1", "--x-count", "3")
    assert code == EXIT_OK
    frame = read_stdout_frame(out)
    assert list(frame.columns) == ["x", "t", "value"]
    assert frame.loc[frame.x == 0, "value"].item() == pytest.approx(1.0 / math.sqrt(4.0 * math.pi), rel=1e-8)


def test_analytics_output_file_and_manifest(tmp_path):
    output = tmp_path / "surface.csv"
    assert main(["analytics", "--output", str(output), "surface", "--layout", "long"]) == EXIT_OK
    assert len(pd.read_csv(output)) == 21 * 100
    assert json.loads((tmp_path / "surface.manifest.json").read_text())["status"] == "success"


def test_invalid_time_exits_with_config_error(capsys):
    code, _ = run_cli(capsys, "analytics", "cauchy", "--t", "0")
    assert code == EXIT_CONFIG


def test_msd_from_synthetic_walkers(capsys):
    code, out = run_cli(capsys, "analytics", "msd", "--gamma", "0.5", "--walkers", "200", "--seed", "1")
    assert code == EXIT_OK
    assert list(read_stdout_frame(out).columns) == ["time", "msd", "count"]
