import math

import numpy as np
import pytest

from spookybound.errors import ConfigError
from spookybound.timetag_sim import (
    ClockModel,
    SourceConfig,
    StationConfig,
    iter_sync_chunks,
    iter_tag_chunks,
    relative_clock,
    simulate_run,
)


def _run(seed=3, chunk_s=0.25, **kw):
    src = SourceConfig(pair_rate_hz=kw.pop("rate", 20_000), duration_s=kw.pop("duration", 1.0),
                       visibility=kw.pop("visibility", 0.913))
    a = StationConfig(**kw.pop("a", {}))
    b = StationConfig(**kw.pop("b", {}))
    return simulate_run(src, a, b, seed, chunk_s=chunk_s), src, a, b


def test_deterministic_and_seed_sensitive():
    r1, *_ = _run(seed=5)
    r2, *_ = _run(seed=5)
    r3, *_ = _run(seed=6)
    for f in ("tags_a", "tags_b", "sync_a", "sync_b"):
        assert getattr(r1, f).tobytes() == getattr(r2, f).tobytes()
    assert r1.tags_a.tobytes() != r3.tags_a.tobytes()


def test_streams_sorted_across_chunks():
    run, *_ = _run(chunk_s=0.01, b={"detector_jitter_sigma_s": 5e-9})
    for tags in (run.tags_a, run.tags_b, run.sync_a, run.sync_b):
        assert np.all(np.diff(tags["timestamp_ps"].astype(np.int64)) >= 0)


def test_counts_match_rates():
    run, src, a, b = _run(rate=50_000, duration=2.0)
    n = run.truth.n_emitted
    assert abs(n - 100_000) < 5 * math.sqrt(100_000)
    expect_a = n * a.efficiency + a.dark_rate_hz * src.duration_s
    assert abs(run.tags_a.size - expect_a) < 5 * math.sqrt(expect_a)
    p_any = 1 - (1 - a.efficiency) * (1 - b.efficiency)
    assert abs(run.truth.pairs.size - n * p_any) < 5 * math.sqrt(n * p_any)
    assert run.sync_a.size == run.sync_b.size == 10_000
    np.testing.assert_array_equal(run.sync_a["pulse_index"], np.arange(10_000))


def test_tdc_quantization_and_values():
    run, *_ = _run(a={"tdc_resolution_s": 50e-12})
    assert np.all(run.tags_a["timestamp_ps"] % 50 == 0)
    assert set(np.unique(run.tags_a["channel"])) <= {0, 1}
    assert set(np.unique(run.tags_a["setting"])) == {0, 1}


def test_chunking_independent_of_pair_statistics():
    """Different chunk sizes give different draws but the same physics."""
    r1, *_ = _run(chunk_s=1.0, seed=11)
    r2, *_ = _run(chunk_s=0.1, seed=11)
    assert abs(r1.truth.pairs.size - r2.truth.pairs.size) < 5 * math.sqrt(r1.truth.pairs.size)


def test_truth_correlations():
    run, *_ = _run(rate=100_000, duration=2.0, visibility=0.913)
    p = run.truth.pairs
    both = p[p["detected_a"] & p["detected_b"]]
    prod = both["outcome_a"].astype(float) * both["outcome_b"]
    # E(a,b) = -V cos(2 * (0 - pi/8)) for setting (0, 0)
    sel = (both["setting_a"] == 0) & (both["setting_b"] == 0)
    e = prod[sel].mean()
    exact = -0.913 * math.cos(math.pi / 4)
    assert abs(e - exact) < 5 * math.sqrt((1 - exact ** 2) / sel.sum())


def test_sync_reflects_clock_model():
    off, drift = 1e-6, 1e-9
    run, *_ = _run(b={"clock_offset_s": off, "clock_drift_s_per_s": drift, "sync_jitter_sigma_s": 0.0},
                   a={"sync_jitter_sigma_s": 0.0})
    ta = run.sync_a["timestamp_ps"].astype(float)
    tb = run.sync_b["timestamp_ps"].astype(float)
    slope, icpt = np.polyfit(ta, tb - ta, 1)
    assert slope == pytest.approx(drift, rel=1e-3)
    assert icpt * 1e-12 == pytest.approx(off + 26.1e-6 * drift, rel=1e-4)
    assert run.truth.relative_clock == pytest.approx((off, drift))


def test_clock_stamp():
    c = ClockModel(offset_s=1e-9, drift_s_per_s=0.0, resolution_ps=10)
    np.testing.assert_array_equal(c.stamp(0, np.array([0.0, 9.9, 10.0, 25.0])), [1000, 1000, 1010, 1020])
    assert c.stamp_scalar(1234.5) == 2230
    assert relative_clock(ClockModel(), ClockModel(2e-6, 1e-8)) == pytest.approx((2e-6, 1e-8))


def test_jitter_clipped():
    run, *_ = _run(rate=100_000, a={"dark_rate_hz": 0.0, "efficiency": 1.0, "detector_jitter_sigma_s": 1e-9,
                                    "tdc_resolution_s": 1e-12},
                   b={"efficiency": 0.0, "dark_rate_hz": 0.0})
    emit = run.truth.pairs["emission_ps"]
    dt = run.tags_a["timestamp_ps"].astype(np.int64) - np.sort(emit) - 26_100_000
    # Sorted tags vs sorted emission agree only in distribution; check the envelope.
    assert np.abs(dt).max() < 8 * 1000 + 200


def test_iterators_yield_chunks():
    src = SourceConfig(duration_s=1.0)
    chunks = list(iter_tag_chunks(src, StationConfig(), StationConfig(), 1, chunk_s=0.3, with_truth=False))
    assert len(chunks) == 4 and chunks[0].truth is None
    assert len(list(iter_sync_chunks(src, StationConfig(), StationConfig(), 1, chunk_s=0.3))) == 4


@pytest.mark.parametrize("kw,field", [
    ({"efficiency": 1.5}, "efficiency"),
    ({"tdc_resolution_s": 0.5e-12}, "tdc_resolution_s"),
    ({"setting_dwell_s": 1e-12, "tdc_resolution_s": 10e-12}, "setting_dwell_s"),
    ({"clock_drift_s_per_s": 0.01}, "clock_drift_s_per_s"),
    ({"clock_offset_s": -1.0}, "clock_offset_s"),
    ({"forced_setting": 2}, "forced_setting"),
])
def test_station_validation(kw, field):
    with pytest.raises(ConfigError) as info:
        StationConfig(**kw)
    assert info.value.field == field


def test_source_validation():
    with pytest.raises(ConfigError):
        SourceConfig(visibility=1.1)
    with pytest.raises(ConfigError):
        SourceConfig(duration_s=0)
