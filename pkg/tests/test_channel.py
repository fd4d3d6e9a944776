"""Channel statistics, uplink accumulation and kernel-backend parity."""

import numpy as np
import pytest
from scipy.stats import kstest

from cfra.channel import (colliding_sets, complex_noise, correlate_uplink,
                          draw_channels, pilot_activity, select_pilots)
from cfra.kernels import (_accumulate_uplink_np, _observe_downlink_np,
                          accumulate_uplink, observe_downlink)
from cfra.scenario import ScenarioConfig, build_topology


def test_channel_moments():
    rng = np.random.default_rng(0)
    beta = np.array([0.5, 2.0])
    h = draw_channels(np.broadcast_to(beta, (200000, 2)), 1, rng)
    var = (np.abs(h[:, :, 0]) ** 2).mean(axis=0)
    assert var == pytest.approx(beta, rel=0.02)
    assert abs(h.mean()) < 0.01


def test_channel_gaussianity_ks():
    # real and imaginary parts are independent N(0, beta/2)
    rng = np.random.default_rng(1)
    h = draw_channels(np.ones(500000), 1, rng)[:, 0]
    stat_re = kstest(h.real * np.sqrt(2.0), "norm").statistic
    stat_im = kstest(h.imag * np.sqrt(2.0), "norm").statistic
    assert stat_re < 0.002
    assert stat_im < 0.002


def test_complex_noise_variance():
    rng = np.random.default_rng(2)
    n = complex_noise((400000,), 3.0, rng)
    assert (np.abs(n) ** 2).mean() == pytest.approx(3.0, rel=0.02)


def test_select_pilots_range_and_uniformity():
    rng = np.random.default_rng(3)
    pilots = select_pilots(100000, 5, rng)
    assert pilots.min() >= 0 and pilots.max() <= 4
    counts = np.bincount(pilots, minlength=5) / pilots.size
    assert np.allclose(counts, 0.2, atol=0.01)


def test_colliding_sets_partition():
    pilots = np.array([0, 2, 2, 4, 0])
    sets = colliding_sets(pilots, 5)
    assert [list(s) for s in sets] == [[0, 4], [], [1, 2], [], [3]]


def test_correlate_uplink_linearity():
    """y minus the noise equals the amplitude-scaled channel sums."""
    cfg = ScenarioConfig()
    rng = np.random.default_rng(4)
    topo = build_topology(cfg, rng, num_ues=6)
    h = draw_channels(topo.beta, cfg.antennas_per_ap, rng)
    pilots = np.array([0, 0, 1, 2, 2, 2])
    state = rng.bit_generator.state
    y = correlate_uplink(h, pilots, cfg, rng)
    rng2 = np.random.default_rng()
    rng2.bit_generator.state = state
    noise = complex_noise((cfg.num_aps, cfg.num_pilots, cfg.antennas_per_ap),
                          cfg.noise_mw, rng2)
    amp = np.sqrt(cfg.ul_power_mw * cfg.num_pilots)
    clean = y - noise
    for t in range(cfg.num_pilots):
        expect = amp * h[pilots == t].sum(axis=0) if (pilots == t).any() else 0.0
        assert np.allclose(clean[:, t, :], expect, atol=1e-12)


def test_pilot_activity_mean():
    """Average activity approaches alpha_lt + sigma^2."""
    cfg = ScenarioConfig()
    rng = np.random.default_rng(5)
    topo = build_topology(cfg, rng, num_ues=3)
    pilots = np.zeros(3, dtype=int)
    acc = np.zeros((cfg.num_pilots, cfg.num_aps))
    reps = 400
    for _ in range(reps):
        h = draw_channels(topo.beta, cfg.antennas_per_ap, rng)
        acc += pilot_activity(correlate_uplink(h, pilots, cfg, rng))
    acc /= reps
    alpha_0 = cfg.ul_power_mw * cfg.num_pilots * topo.beta.sum(axis=0)
    assert np.allclose(acc[0], alpha_0 + cfg.noise_mw,
                       rtol=0.15, atol=5 * cfg.noise_mw)
    # unused pilots contain only noise
    assert acc[3].mean() == pytest.approx(cfg.noise_mw, rel=0.05)


def test_kernel_backends_bit_identical():
    rng = np.random.default_rng(6)
    K, L, T, N = 9, 16, 5, 4
    h = (rng.standard_normal((K, L, N)) + 1j * rng.standard_normal((K, L, N)))
    pilots = rng.integers(0, T, size=K)
    noise = 0.1 * (rng.standard_normal((L, T, N)) + 1j * rng.standard_normal((L, T, N)))
    y_sel = accumulate_uplink(h, pilots, 2.5, noise)
    y_np = _accumulate_uplink_np(h, pilots, 2.5, noise)
    assert np.array_equal(y_sel, y_np) or np.allclose(y_sel, y_np, rtol=0, atol=1e-14)

    scale = rng.random((L, T))
    dl_noise = 0.1 * (rng.standard_normal(K) + 1j * rng.standard_normal(K))
    z_sel = observe_downlink(h, y_np, pilots, scale, dl_noise)
    z_np = _observe_downlink_np(h, y_np, pilots, scale, dl_noise)
    assert np.allclose(z_sel, z_np, rtol=0, atol=1e-12)


def test_favorable_propagation():
    """Cross-correlation of distinct UEs' channels vanishes as N grows."""
    rng = np.random.default_rng(7)
    prev = None
    for n in (8, 64, 512):
        h = draw_channels(np.ones((2000, 2)), n, rng)
        cross = np.abs((np.conj(h[:, 0, :]) * h[:, 1, :]).sum(axis=1)) / n
        level = cross.mean()
        if prev is not None:
            assert level < prev
        prev = level
