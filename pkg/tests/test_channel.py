import numpy as np
import pytest

from irsdof.channel import ChannelRealization, SystemConfig, sample, variance_params
from irsdof.montecarlo import RandomStream


def test_variance_params_frozen_default_geometry():
    s1, s2 = variance_params(SystemConfig(K=3, Q=9))
    # (0.06 m over 4 pi times 25 sqrt(2) m) squared
    assert round(s1 / 1e-8, 4) == 1.8238
    assert s1 == s2  # same distance, no blockage


def test_variance_params_blockage_scales_direct_only():
    base_s1, base_s2 = variance_params(SystemConfig(K=2, Q=4))
    s1, s2 = variance_params(SystemConfig(K=2, Q=4, blockage=0.25))
    assert s1 == base_s1
    assert s2 == pytest.approx(0.25 * base_s2, rel=1e-15)


def test_config_validation():
    with pytest.raises(ValueError):
        SystemConfig(K=0, Q=4)
    with pytest.raises(ValueError):
        SystemConfig(K=2, Q=-1)
    with pytest.raises(ValueError):
        SystemConfig(K=2, Q=4, blockage=0.0)
    with pytest.raises(ValueError):
        SystemConfig(K=2, Q=4, blockage=1.5)
    with pytest.raises(ValueError):
        SystemConfig(K=2, Q=4, wavelength_m=-0.06)
    SystemConfig(K=1, Q=0)  # single-user, surface-free configs are allowed


def test_realization_shapes_and_dtype():
    ch = sample(SystemConfig(K=3, Q=7), RandomStream(1, 0))
    assert ch.direct.shape == (3, 3)
    assert ch.tx_to_irs.shape == (7, 3)
    assert ch.irs_to_rx.shape == (3, 7)
    assert ch.direct.dtype == np.complex128
    assert ch.K == 3 and ch.Q == 7


def test_realization_shape_validation():
    rng = np.random.default_rng(0)
    good = lambda *s: rng.standard_normal(s) + 0j
    with pytest.raises(ValueError):
        ChannelRealization(direct=good(2, 3), tx_to_irs=good(4, 2),
                           irs_to_rx=good(2, 4))
    with pytest.raises(ValueError):
        ChannelRealization(direct=good(2, 2), tx_to_irs=good(4, 3),
                           irs_to_rx=good(2, 4))
    with pytest.raises(ValueError):
        ChannelRealization(direct=good(2, 2), tx_to_irs=good(4, 2),
                           irs_to_rx=good(4, 2))


def test_sampling_is_deterministic_per_stream():
    cfg = SystemConfig(K=2, Q=5)
    a = sample(cfg, RandomStream(3, 14))
    b = sample(cfg, RandomStream(3, 14))
    c = sample(cfg, RandomStream(3, 15))
    assert np.array_equal(a.direct, b.direct)
    assert np.array_equal(a.tx_to_irs, b.tx_to_irs)
    assert np.array_equal(a.irs_to_rx, b.irs_to_rx)
    assert not np.array_equal(a.direct, c.direct)


def test_sampling_is_prefix_stable_in_q():
    # same stream, bigger surface: the direct block and the first
    # elements' gains must be bit-identical
    small = sample(SystemConfig(K=3, Q=9), RandomStream(8, 2))
    large = sample(SystemConfig(K=3, Q=18), RandomStream(8, 2))
    assert np.array_equal(small.direct, large.direct)
    assert np.array_equal(small.tx_to_irs, large.tx_to_irs[:9])
    assert np.array_equal(small.irs_to_rx, large.irs_to_rx[:, :9])


def test_gain_moments_match_the_configured_variances():
    cfg = SystemConfig(K=2, Q=64, blockage=0.3)
    s1, s2 = variance_params(cfg)
    direct, surface = [], []
    for i in range(400):
        ch = sample(cfg, RandomStream(21, i))
        direct.append(ch.direct.ravel())
        surface.append(ch.tx_to_irs.ravel())
    direct = np.concatenate(direct)      # 1600 entries
    surface = np.concatenate(surface)    # 51200 entries
    assert abs(np.mean(direct.real)) < 4.0 * np.sqrt(s2 / 2 / direct.size)
    assert np.var(direct) == pytest.approx(s2, rel=0.10)
    assert np.var(surface) == pytest.approx(s1, rel=0.03)
    # circular symmetry: equal quadrature variances, no correlation
    assert np.var(surface.real) == pytest.approx(s1 / 2, rel=0.04)
    assert np.var(surface.imag) == pytest.approx(s1 / 2, rel=0.04)
    corr = np.corrcoef(surface.real, surface.imag)[0, 1]
    assert abs(corr) < 0.02


def test_q_zero_has_empty_surface_blocks():
    ch = sample(SystemConfig(K=2, Q=0), RandomStream(1, 0))
    assert ch.tx_to_irs.shape == (0, 2)
    assert ch.irs_to_rx.shape == (2, 0)
