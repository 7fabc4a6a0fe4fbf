"""Command line interface: subcommands, exit codes, overrides."""

import json

import pytest

from hris_sim.cli import main


def _write_tiny_aoa(tmp_path):
    path = tmp_path / "cfg.yaml"
    path.write_text(
        "version: 1\n"
        "experiment: aoa_rmse\n"
        "seed: 4\n"
        "n_trials: 2\n"
        "aoa:\n"
        "  n_list: [16]\n"
        "  sensed_fractions: [0.5]\n"
        "  n_snapshots: 16\n"
        "  snr_db_grid: [10.0]\n",
        encoding="utf-8")
    return path


def test_run_success_exit_zero(tmp_path, capsys):
    cfg = _write_tiny_aoa(tmp_path)
    out = tmp_path / "res"
    assert main(["run", str(cfg), "--out", str(out)]) == 0
    printed = capsys.readouterr().out
    assert "wrote" in printed and "aoa_rmse.csv" in printed
    assert (out / "aoa_rmse.csv").exists()
    assert (out / "metadata.json").exists()


def test_config_problems_exit_two(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("version: 1\nexperiment: nope\n", encoding="utf-8")
    assert main(["run", str(bad), "--out", str(tmp_path / "o")]) == 2
    assert "config error:" in capsys.readouterr().err
    assert main(["run", str(tmp_path / "missing.yaml")]) == 2


def test_infeasible_setup_exits_three(tmp_path, capsys):
    cfg = tmp_path / "infeasible.yaml"
    # Too few slots for the sensing stage to reach full rank.
    cfg.write_text(
        "version: 1\n"
        "experiment: rf_chain_sweep\n"
        "n_trials: 1\n"
        "channel: {n_atoms: 8, n_users: 2, n_bs_antennas: 4}\n"
        "rf_sweep: {n_rf_grid: [1], snr_db_list: [0.0], n_slots: 4}\n",
        encoding="utf-8")
    assert main(["run", str(cfg), "--out", str(tmp_path / "o")]) == 3
    err = capsys.readouterr().err
    assert "infeasible:" in err and "rank" in err


def test_workers_flag_validation(tmp_path, capsys):
    cfg = _write_tiny_aoa(tmp_path)
    assert main(["run", str(cfg), "--workers", "zero",
                 "--out", str(tmp_path / "o")]) == 2
    assert "--workers" in capsys.readouterr().err
    assert main(["run", str(cfg), "--workers", "0",
                 "--out", str(tmp_path / "o")]) == 2


def test_workers_do_not_change_outputs(tmp_path):
    cfg = _write_tiny_aoa(tmp_path)
    assert main(["run", str(cfg), "--workers", "1", "--out", str(tmp_path / "w1")]) == 0
    assert main(["run", str(cfg), "--workers", "2", "--out", str(tmp_path / "w2")]) == 0
    assert ((tmp_path / "w1/aoa_rmse.csv").read_bytes()
            == (tmp_path / "w2/aoa_rmse.csv").read_bytes())


def test_seed_override_recorded(tmp_path):
    cfg = _write_tiny_aoa(tmp_path)
    assert main(["run", str(cfg), "--seed", "77", "--out", str(tmp_path / "o")]) == 0
    meta = json.loads((tmp_path / "o/metadata.json").read_text())
    assert meta["seed"] == 77


def test_beampattern_subcommand(tmp_path):
    out = tmp_path / "beam"
    assert main(["beampattern", "--n-h", "12", "--n-v", "12",
                 "--steer-deg", "20", "--n-points", "91",
                 "--out", str(out)]) == 0
    lines = (out / "beampattern.csv").read_text().strip().splitlines()
    assert lines[0] == "angle_deg,gain_db"
    assert len(lines) == 92


def test_beampattern_bad_parameters_exit_two(tmp_path, capsys):
    assert main(["beampattern", "--n-h", "12", "--n-v", "12",
                 "--steer-deg", "95", "--out", str(tmp_path / "o")]) == 2
    assert "steer_deg" in capsys.readouterr().err


def test_unknown_preset_rejected_by_parser():
    with pytest.raises(SystemExit) as exc:
        main(["preset", "fig99"])
    assert exc.value.code == 2


def test_missing_subcommand_rejected():
    with pytest.raises(SystemExit):
        main([])
