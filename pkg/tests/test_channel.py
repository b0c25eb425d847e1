import math

import numpy as np
import pytest

from urllcsim.channel import (
    BlerTable,
    ChannelConfigError,
    CoherenceConfig,
    estimate_channel,
    mmse_equalize,
    monotonize_nonincreasing,
    observe_dmrs,
    pilots_per_tile,
    realize_channel,
)


def test_same_seed_identical_gains():
    cfg = CoherenceConfig()
    a = realize_channel(7, 10.0, cfg)
    b = realize_channel(7, 10.0, cfg)
    assert np.array_equal(a.tile_gains, b.tile_gains)
    assert a.noise_variance == b.noise_variance == pytest.approx(0.1)


def test_tile_structure_matches_coherence_config():
    assert CoherenceConfig(100, 25.0).n_tiles == 4
    assert CoherenceConfig(100, 30.0).n_tiles == 4
    assert CoherenceConfig(100, math.inf).n_tiles == 1
    cfg = CoherenceConfig(100, 25.0)
    assert cfg.tile_of_rb(0) == 0 and cfg.tile_of_rb(24) == 0
    assert cfg.tile_of_rb(25) == 1 and cfg.tile_of_rb(99) == 3


def test_infinite_coherence_bandwidth_single_gain():
    cfg = CoherenceConfig(100, math.inf)
    real = realize_channel(3, 0.0, cfg)
    assert real.tile_gains.size == 1
    assert real.gain_for_rb(0, cfg) == real.gain_for_rb(99, cfg)


def test_unit_mean_power_monte_carlo():
    # moment oracle over many seeds: E[|h|^2] = 1 within 1%
    cfg = CoherenceConfig(100, 25.0)
    acc = 0.0
    n = 100_000
    rng = np.random.default_rng(0)
    gains = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2)
    # spot check that realize_channel matches the same distribution
    sample = np.concatenate([realize_channel(s, 0.0, cfg).tile_gains for s in range(500)])
    assert abs(np.mean(np.abs(gains) ** 2) - 1.0) < 0.01
    assert abs(np.mean(np.abs(sample) ** 2) - 1.0) < 0.1


def test_pilots_per_tile_densities():
    assert pilots_per_tile(12, 25.0) == 25
    assert pilots_per_tile(24, 25.0) == 50
    with pytest.raises(ChannelConfigError):
        pilots_per_tile(13, 25.0)


def test_estimate_noiseless_limit():
    obs = np.full((4, 8), 0.3 + 0.4j)
    est, err = estimate_channel(obs, noise_variance=0.0)
    assert np.allclose(est, 0.3 + 0.4j)
    assert err == 0.0


def test_estimate_single_pilot_half_mse_at_0db():
    # closed form: MSE = 1 / (1 + SNR * N_p) = 0.5 at SNR 0 dB, one pilot
    _, err = estimate_channel(np.ones((1, 1)), noise_variance=1.0)
    assert err == pytest.approx(0.5)


def test_estimate_mse_matches_closed_form():
    rng = np.random.default_rng(5)
    snr_db = 3.0
    noise_var = 10 ** (-snr_db / 10)
    for n_p in (1, 4, 25):
        n = 100_000
        h = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2)
        noise = (
            rng.standard_normal((n, n_p)) + 1j * rng.standard_normal((n, n_p))
        ) * math.sqrt(noise_var / 2)
        est, err = estimate_channel(h[:, None] + noise, noise_var)
        mse = np.mean(np.abs(est - h) ** 2)
        closed = 1.0 / (1.0 + n_p / noise_var)
        assert err == pytest.approx(closed)
        assert mse == pytest.approx(closed, rel=0.02)


def test_density_24_beats_density_12():
    rng = np.random.default_rng(6)
    cfg = CoherenceConfig(100, 25.0)
    chan = realize_channel(1, 0.0, cfg)
    mses = {}
    for density in (12, 24):
        n_p = pilots_per_tile(density, 25.0)
        obs = observe_dmrs(chan, n_p, rng)
        _, err = estimate_channel(obs, chan.noise_variance)
        mses[density] = err
    assert mses[24] < mses[12]


def test_estimate_requires_pilots():
    with pytest.raises(ChannelConfigError):
        estimate_channel(np.ones((4, 0)), 0.1)


def test_mmse_equalize_perfect_recovery():
    x = np.array([1 + 1j, -1 + 0.5j, 0.3 - 0.2j])
    h = np.array([0.9 - 0.1j, 1.2 + 0.4j, 0.7 + 0j])
    soft, post = mmse_equalize(h * x, h, noise_variance=0.0)
    assert np.allclose(soft, x)
    assert np.all(np.isinf(post))


def test_post_snr_flat_case():
    _, post = mmse_equalize(np.ones(4), np.ones(4), noise_variance=0.1)
    assert post == pytest.approx(np.full(4, 10.0))


def test_estimation_error_lowers_post_snr():
    # SINR oracle: |h|^2 / (noise + err) strictly below the genie value
    h = np.array([1.0 + 0j])
    _, genie = mmse_equalize(np.ones(1), h, 0.1, estimation_error_variance=0.0)
    _, degraded = mmse_equalize(np.ones(1), h, 0.1, estimation_error_variance=0.05)
    expected = 1.0 / (0.1 + 0.05)
    assert degraded[0] == pytest.approx(expected)
    assert degraded[0] < genie[0]


def _demo_table():
    t = BlerTable()
    t.add_curve("mcs0", 100, [0.0, 2.0, 4.0, 6.0], [0.9, 0.5, 0.05, 0.001])
    return t


def test_bler_clamps_at_extremes():
    t = _demo_table()
    assert t.bler(math.inf, "mcs0", 100) == 0.0
    assert t.bler(-math.inf, "mcs0", 100) == 1.0
    assert t.bler(60.0, "mcs0", 100) < 1e-9
    assert t.bler(-30.0, "mcs0", 100) == 1.0


def test_bler_monotone_everywhere():
    t = _demo_table()
    grid = np.linspace(-10, 20, 200)
    vals = [t.bler(s, "mcs0", 100) for s in grid]
    assert all(a >= b for a, b in zip(vals, vals[1:]))
    assert all(0.0 <= v <= 1.0 for v in vals)


def test_bler_interpolates_between_points():
    t = _demo_table()
    assert t.bler(2.0, "mcs0", 100) == pytest.approx(0.5)
    mid = t.bler(3.0, "mcs0", 100)
    assert 0.05 < mid < 0.5


def test_bler_unknown_mcs_rejected():
    t = _demo_table()
    with pytest.raises(ChannelConfigError):
        t.bler(1.0, "nope", 100)


def test_bler_nearest_codeblock_length():
    t = BlerTable()
    t.add_curve("m", 100, [0.0, 2.0], [0.5, 0.1])
    t.add_curve("m", 400, [0.0, 2.0], [0.9, 0.4])
    assert t.bler(0.0, "m", 120) == pytest.approx(0.5)
    assert t.bler(0.0, "m", 350) == pytest.approx(0.9)


def test_bler_csv_roundtrip():
    t = _demo_table()
    t.add_curve("mcs1", 50, [0.0, 1.0], [0.2, 0.01])
    text = t.to_csv()
    back = BlerTable.from_csv(text)
    assert back.entries == t.entries
    assert back.to_csv() == text


def test_bler_csv_schema_enforced():
    with pytest.raises(ChannelConfigError):
        BlerTable.from_csv("mcs,cb_len,snr_db,bler\n")


def test_isotonic_regression_pools_violators():
    vals = np.array([0.5, 0.6, 0.3, 0.1, 0.2])
    out = monotonize_nonincreasing(vals)
    assert all(a >= b for a, b in zip(out, out[1:]))
    assert out[0] == pytest.approx(0.55)
    assert np.sum(out) == pytest.approx(np.sum(vals))
