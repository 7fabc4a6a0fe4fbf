"""Result files: CSV formatting, beampattern emitter, end-to-end run()."""

import json
import math

import numpy as np
import pytest

from hris_sim.arrays import PlanarArray
from hris_sim.channels import draw_channels, load_matrix
from hris_sim.config import parse_config_tree
from hris_sim.rng import TAG_CHANNEL, substream
from hris_sim.runner import emit_beampattern, run, write_csv

ARR12 = PlanarArray(12, 12, 0.004, 0.0157)


def test_csv_cell_formatting(tmp_path):
    rows = [{"a": 3, "b": 0.1, "c": float("nan"), "d": "ok"},
            {"a": np.int64(-2), "b": 1234567.25, "c": 2.0, "d": "x"}]
    path = tmp_path / "t.csv"
    write_csv(path, rows, ["a", "b", "c", "d"])
    raw = path.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode().splitlines()
    assert lines[0] == "a,b,c,d"
    assert lines[1] == "3,0.1,,ok"       # NaN becomes an empty cell
    assert lines[2] == "-2,1234567.25,2,x"


def test_beampattern_peak_at_commanded_angle():
    rows = emit_beampattern(ARR12, steer_deg=25.0, n_points=1441)
    assert len(rows) == 1441
    angles = np.array([r["angle_deg"] for r in rows])
    gains = np.array([r["gain_db"] for r in rows])
    step = angles[1] - angles[0]
    assert np.all(np.diff(angles) > 0)
    assert gains.max() == 0.0
    assert abs(angles[int(np.argmax(gains))] - 25.0) <= step
    assert np.all(gains >= -400.0)


def test_beampattern_broadside_cut_is_symmetric():
    rows = emit_beampattern(ARR12, steer_deg=0.0, n_points=181)
    gains = np.array([r["gain_db"] for r in rows])
    np.testing.assert_allclose(gains, gains[::-1], atol=1e-9)
    assert gains[90] == 0.0  # broadside peak at the centre sample


def test_beampattern_negative_steer_mirrors_positive():
    pos = emit_beampattern(ARR12, steer_deg=30.0, n_points=361)
    neg = emit_beampattern(ARR12, steer_deg=-30.0, n_points=361)
    gp = np.array([r["gain_db"] for r in pos])
    gn = np.array([r["gain_db"] for r in neg])
    np.testing.assert_allclose(gp, gn[::-1], atol=1e-9)


def _tiny_aoa_tree(**over):
    tree = {"version": 1, "experiment": "aoa_rmse", "seed": 5, "n_trials": 3,
            "aoa": {"n_list": [16], "sensed_fractions": [0.4, 0.8],
                    "n_snapshots": 16, "snr_db_grid": [5.0, 15.0]}}
    tree.update(over)
    return tree


def test_run_aoa_writes_csv_and_metadata(tmp_path):
    cfg = parse_config_tree(_tiny_aoa_tree())
    paths = run(cfg, out_dir=tmp_path)
    csv_text = (tmp_path / "aoa_rmse.csv").read_text()
    lines = csv_text.strip().splitlines()
    assert lines[0] == "N,sensed_fraction,snr_db,n_trials,rmse_rad,rmse_deg,crlb_rad"
    assert len(lines) == 1 + 2 * 2  # fractions x snrs
    meta = json.loads((tmp_path / "metadata.json").read_text())
    assert meta["experiment"] == "aoa_rmse"
    assert meta["seed"] == 5
    assert meta["outputs"] == {"csv": "aoa_rmse.csv", "rows": 4}
    assert meta["rng"]["bit_generator"] == "Philox"
    assert meta["derived"]["search_grid_points"] == 721
    assert meta["config"] == cfg.raw
    assert paths["csv"].endswith("aoa_rmse.csv")


def test_run_worker_count_never_changes_bytes(tmp_path):
    cfg1 = parse_config_tree(_tiny_aoa_tree())
    cfg2 = parse_config_tree(_tiny_aoa_tree())
    run(cfg1, out_dir=tmp_path / "w1", workers=1)
    run(cfg2, out_dir=tmp_path / "w2", workers=2)
    assert ((tmp_path / "w1/aoa_rmse.csv").read_bytes()
            == (tmp_path / "w2/aoa_rmse.csv").read_bytes())


def test_run_seed_override_changes_results(tmp_path):
    cfg1 = parse_config_tree(_tiny_aoa_tree())
    cfg2 = parse_config_tree(_tiny_aoa_tree())
    run(cfg1, out_dir=tmp_path / "a", seed=1)
    run(cfg2, out_dir=tmp_path / "b", seed=2)
    assert cfg1.seed == 1  # override is recorded on the config
    assert ((tmp_path / "a/aoa_rmse.csv").read_bytes()
            != (tmp_path / "b/aoa_rmse.csv").read_bytes())


def test_run_chest_dumps_channels(tmp_path):
    tree = {"version": 1, "experiment": "chest_tradeoff", "seed": 9,
            "n_trials": 2, "dump_channels": True,
            "channel": {"n_atoms": 8, "n_users": 2, "n_bs_antennas": 4},
            "tradeoff": {"rho_grid": [0.5], "n_phase_draws": 1,
                         "n_rf_chains": 2, "pilot_count": 8}}
    cfg = parse_config_tree(tree)
    paths = run(cfg, out_dir=tmp_path)
    matrix, info = load_matrix(paths["dump_H"])
    assert matrix.shape == (8, 2)
    assert info["seed"] == 9 and info["stream_id"] == TAG_CHANNEL
    # The dump must hold the same draw the experiment's trial-0 stream yields.
    ch = draw_channels(cfg.chest_dims.geom, 8, 2, 4,
                       substream(9, "chest_tradeoff", 0, TAG_CHANNEL),
                       pathloss_model="none")
    np.testing.assert_allclose(matrix, ch.H.astype(np.complex64), rtol=1e-6)
    g_matrix, _ = load_matrix(paths["dump_G"])
    assert g_matrix.shape == (4, 8)
    meta = json.loads((tmp_path / "metadata.json").read_text())
    assert meta["derived"]["pilot_count"] == 8
    assert meta["derived"]["n_slots"] == 4
    assert meta["derived"]["h_stage_identifiable"] is True
    assert meta["derived"]["baseline_identifiable"] is False


def test_run_checks_row_count(tmp_path, monkeypatch):
    import hris_sim.runner as runner_mod
    cfg = parse_config_tree(_tiny_aoa_tree())
    monkeypatch.setattr(runner_mod, "rmse_experiment",
                        lambda *a, **k: [{"N": 16}])
    with pytest.raises(AssertionError, match="expected the full parameter grid"):
        run(cfg, out_dir=tmp_path)


def test_beampattern_run_row_count(tmp_path):
    tree = {"version": 1, "experiment": "beampattern",
            "array": {"n_h": 8, "n_v": 8},
            "beampattern": {"steer_deg": 10.0, "n_points": 101}}
    cfg = parse_config_tree(tree)
    run(cfg, out_dir=tmp_path)
    lines = (tmp_path / "beampattern.csv").read_text().strip().splitlines()
    assert lines[0] == "angle_deg,gain_db"
    assert len(lines) == 102
    meta = json.loads((tmp_path / "metadata.json").read_text())
    assert meta["derived"] == {"n_elements": 64, "steer_deg": 10.0}