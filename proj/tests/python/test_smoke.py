import math

import numpy as np
import pytest

import rantsim


def test_fixed_point_orbit():
    path = rantsim.integrate_phase(math.pi / 2, 0.5, 2.0, 1e-3, 10.0, 100)
    assert path.shape[1] == 3
    assert np.max(np.abs(path[:, 2] * 2.0 - 1.0)) < 1e-9


def test_trap_prediction():
    reg = rantsim.TrapRegime(3.0, 2.0 / 3.0 * 4.0)
    assert rantsim.trapping_radius_geometric(reg) == pytest.approx(1.0)
    pred = rantsim.critical_gain(reg)
    assert pred["G_c"] > 0
    assert pred["formula"]
    with pytest.raises(ValueError):
        rantsim.TrapRegime(-1.0, 1.0)


def test_greens_oracle_far_field_small():
    assert rantsim.greens_oracle(5.0, 0.0, 1.0, D_c=0.1) < 1e-12
    with pytest.raises(rantsim.ConfigError):
        rantsim.greens_oracle(0.0, 0.0, 1.0)


def test_continuum_preset_mass():
    d0 = rantsim.continuum_preset("construction", 0.1, 0.0)
    d1 = rantsim.continuum_preset("construction", 0.1, 0.1)
    assert d1["rho_a"].shape == (60, 80)
    assert d1["rho_a"].sum() == pytest.approx(d0["rho_a"].sum(), rel=1e-12)
    assert d1["K"] == pytest.approx(1.44338, rel=1e-4)


def test_config_errors_name_the_key():
    with pytest.raises(ValueError, match="behavior.Cc"):
        rantsim.scenario_echo({"behavior.Cc": 1})
    echo = rantsim.scenario_echo({"scenario.mode": "construction", "behavior.C": 0.5})
    assert echo["behavior.C"] == "0.5"
    assert set(echo) == set(rantsim.known_keys())


def test_run_is_deterministic(tmp_path):
    cfg = {
        "scenario.mode": "construction",
        "sim.total_time": 10,
        "world.n_agents": 3,
        "world.n_elements": 40,
        "scenario.snapshot_interval": 5,
    }
    a = rantsim.run(cfg, 4, tmp_path / "a")
    b = rantsim.run(cfg, 4, tmp_path / "b")
    assert a == b
    assert (tmp_path / "a" / "metrics.csv").read_bytes() == (tmp_path / "b" / "metrics.csv").read_bytes()
