"""Configuration, topology and nearby-set tests."""

import math

import numpy as np
import pytest

from cfra.scenario import (MIN_DISTANCE_M, ScenarioConfig, ap_grid,
                           bs_topology, build_topology, db_to_linear,
                           limit_distance, linear_to_db, load_config,
                           natural_sets, nearby_set, nearby_set_topn,
                           pathloss_beta)


def test_db_roundtrip():
    for v in (-94.0, -30.5, 0.0, 23.0):
        assert linear_to_db(db_to_linear(v)) == pytest.approx(v, abs=1e-12)


def test_noise_power_linear():
    cfg = ScenarioConfig()
    assert cfg.noise_mw == pytest.approx(10 ** (-9.4), rel=1e-12)


def test_config_validation():
    with pytest.raises(ValueError):
        ScenarioConfig(num_pilots=0)
    with pytest.raises(ValueError):
        ScenarioConfig(l_max=65)
    with pytest.raises(ValueError):
        ScenarioConfig(iota=0.5)
    with pytest.raises(ValueError):
        ScenarioConfig(access_probability=1.5)


def test_load_config(tmp_path):
    path = tmp_path / "scenario.cfg"
    path.write_text(
        "# comment line\n"
        "square_length_m = 200\n"
        "num_pilots = 3   # trailing comment\n"
        "\n"
        "ul_power_mw = 50\n")
    cfg = load_config(path)
    assert cfg.square_length_m == 200.0
    assert cfg.num_pilots == 3
    assert cfg.ul_power_mw == 50.0
    assert cfg.num_aps == 64  # untouched default


def test_load_config_rejects_unknown_key(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("not_a_field = 3\n")
    with pytest.raises(ValueError, match="unknown key"):
        load_config(path)


def test_load_config_rejects_malformed_line(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("just words\n")
    with pytest.raises(ValueError, match="key = value"):
        load_config(path)


def test_ap_grid_geometry():
    aps = ap_grid(64, 400.0)
    assert aps.shape == (64, 2)
    assert aps.min() == pytest.approx(25.0)
    assert aps.max() == pytest.approx(375.0)
    # pitch 50 m in both directions
    xs = np.unique(aps[:, 0])
    assert np.allclose(np.diff(xs), 50.0)


def test_ap_grid_rejects_non_square():
    with pytest.raises(ValueError):
        ap_grid(60, 400.0)


def test_pathloss_reference_values():
    cfg = ScenarioConfig()
    # limit radius of the reference scenario and its edge gain
    d_lim = limit_distance(cfg, iota=1.0)
    assert d_lim == pytest.approx(73.30, abs=0.05)
    beta_db = linear_to_db(pathloss_beta(np.array([d_lim]), cfg))[0]
    assert beta_db == pytest.approx(-99.0, abs=1.5)
    # at the limit radius the received DL power meets the noise floor
    assert cfg.dl_power_per_ap_mw * db_to_linear(beta_db) == pytest.approx(
        cfg.noise_mw, rel=1e-9)


def test_limit_distance_iota_scaling():
    cfg = ScenarioConfig()
    d1 = limit_distance(cfg, iota=1.0)
    d2 = limit_distance(cfg, iota=2.0)
    assert d2 == pytest.approx(d1 * 2.0 ** (-1.0 / cfg.pathloss_exponent))


def test_distance_clamp():
    cfg = ScenarioConfig()
    beta = pathloss_beta(np.array([0.0]), cfg)
    assert np.isfinite(beta).all()
    assert beta[0] == pytest.approx(cfg.omega_lin * MIN_DISTANCE_M ** (-cfg.pathloss_exponent))


def test_build_topology_shapes_and_bounds():
    cfg = ScenarioConfig()
    rng = np.random.default_rng(0)
    topo = build_topology(cfg, rng, num_ues=10)
    assert topo.beta.shape == (10, 64)
    assert topo.distances.shape == (10, 64)
    assert (topo.ue_positions >= 0).all()
    assert (topo.ue_positions <= 400).all()
    # distances consistent with positions
    d = np.linalg.norm(topo.ue_positions[3] - topo.ap_positions[17])
    assert topo.distances[3, 17] == pytest.approx(d)


def test_topology_fixed_positions():
    cfg = ScenarioConfig()
    rng = np.random.default_rng(0)
    pos = np.array([[25.0, 25.0]])
    topo = build_topology(cfg, rng, ue_positions=pos)
    # UE atop the first AP: that AP has the largest gain
    assert topo.beta[0].argmax() == 0


def test_bs_topology_center():
    cfg = ScenarioConfig()
    topo = bs_topology(cfg, np.array([[200.0, 200.0], [0.0, 0.0]]))
    assert topo.beta.shape == (2, 1)
    assert topo.distances[0, 0] == pytest.approx(0.0, abs=1e-9)
    assert topo.distances[1, 0] == pytest.approx(200.0 * math.sqrt(2.0))


def test_nearby_set_threshold_and_fallback():
    cfg = ScenarioConfig()
    rng = np.random.default_rng(1)
    topo = build_topology(cfg, rng, num_ues=50)
    d_lim = limit_distance(cfg, iota=1.0)
    for ue in range(50):
        ns = nearby_set(topo, ue, cfg, iota=1.0)
        assert ns.ap_indices.size >= 1
        inside = np.flatnonzero(topo.distances[ue] < d_lim)
        assert set(inside) <= set(ns.ap_indices.tolist())
        # strongest first
        gains = topo.beta[ue, ns.ap_indices]
        assert (np.diff(gains) <= 1e-18).all()


def test_nearby_set_fallback_single_strongest():
    cfg = ScenarioConfig(dl_power_per_ap_mw=1e-12)  # threshold excludes all
    rng = np.random.default_rng(2)
    topo = build_topology(cfg, rng, num_ues=5)
    for ue in range(5):
        ns = nearby_set(topo, ue, cfg)
        assert ns.ap_indices.size == 1
        assert ns.ap_indices[0] == topo.beta[ue].argmax()


def test_nearby_set_topn():
    cfg = ScenarioConfig()
    rng = np.random.default_rng(3)
    topo = build_topology(cfg, rng, num_ues=4)
    ns = nearby_set_topn(topo, 0, 7)
    assert ns.ap_indices.size == 7
    assert topo.beta[0, ns.ap_indices[0]] == topo.beta[0].max()


def test_natural_sets_match_single_calls():
    cfg = ScenarioConfig()
    rng = np.random.default_rng(4)
    topo = build_topology(cfg, rng, num_ues=6)
    sets = natural_sets(topo, cfg, range(6))
    for ue in range(6):
        single = nearby_set(topo, ue, cfg, iota=1.0).ap_indices
        assert np.array_equal(sets[ue], single)
