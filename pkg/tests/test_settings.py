import numpy as np
import pytest

from spookybound.timetag_sim import SettingSchedule, StationConfig, generate_setting_stream
from spookybound.timetag_sim.settings import _splitmix64


def test_splitmix64_reference_vector():
    # Reference outputs of splitmix64 seeded with 0 (state advances by the golden gamma).
    gamma = 0x9E3779B97F4A7C15
    x = np.array([0, gamma, 2 * gamma % 2**64], dtype=np.uint64)
    assert [int(v) for v in _splitmix64(x)] == [
        0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]


def test_balanced_and_deterministic(rng):
    cfg = StationConfig()
    s = SettingSchedule.from_rng(cfg, rng)
    c = s.choices(np.arange(200_000))
    assert abs(c.mean() - 0.5) < 4 * 0.5 / np.sqrt(c.size)
    np.testing.assert_array_equal(c, s.choices(np.arange(200_000)))
    # Lag-1 correlation of an unbiased independent binary sequence is ~0.
    x = c.astype(float) - c.mean()
    assert abs(np.mean(x[1:] * x[:-1]) / x.var()) < 4 / np.sqrt(c.size)


def test_setting_at_follows_delay():
    cfg = StationConfig(setting_dwell_s=1e-6, electronic_delay_s=3e-6)
    s = SettingSchedule.from_config(cfg, key=99)
    k = np.arange(50)
    t = k * 1_000_000 + 3_000_000
    np.testing.assert_array_equal(s.setting_at(t), s.choices(k))
    np.testing.assert_array_equal(s.setting_at(t + 999_999), s.choices(k))
    np.testing.assert_array_equal(s.setting_at(t - 1)[1:], s.choices(k[:-1]))


def test_forced_setting():
    s = SettingSchedule.from_config(StationConfig(forced_setting=1), key=1)
    assert np.all(s.choices(np.arange(10)) == 1)


def test_stream_covers_duration(rng):
    out = generate_setting_stream(StationConfig(), 1e-3, rng)
    assert out.settings.size == 1000
    np.testing.assert_allclose(out.choice_times_s[:3], [0, 1e-6, 2e-6])
    np.testing.assert_array_equal(out.settings, out.schedule.choices(np.arange(1000)))


def test_distinct_keys_independent():
    cfg = StationConfig()
    a = SettingSchedule.from_config(cfg, 1).choices(np.arange(100_000))
    b = SettingSchedule.from_config(cfg, 2).choices(np.arange(100_000))
    assert abs(np.mean(a == b) - 0.5) < 0.01
