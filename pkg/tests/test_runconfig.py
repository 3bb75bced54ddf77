import math

import pytest

from spookybound.errors import ConfigError
from spookybound.runconfig import load_config, parse_event, parse_number, require_events


@pytest.mark.parametrize("text,value", [("1e-3", 1e-3), ("pi/2", math.pi / 2), ("-2*pi", -2 * math.pi),
                                        ("c*1e-6", 299.792458), ("3", 3.0)])
def test_parse_number(text, value):
    assert parse_number(text, "x") == pytest.approx(value)


@pytest.mark.parametrize("text", ["__import__('os')", "1/0", "inf", "pi ** 2000", "10 ** 10 ** 10",
                                  "1e308 * 10", "abc", ""])
def test_parse_number_rejects(text):
    with pytest.raises(ConfigError) as info:
        parse_number(text, "bound.beta")
    assert info.value.field == "bound.beta"


def test_parse_event_forms():
    assert parse_event("-7.8e3, 23.1e-6", "events.a").position_m == (-7800.0, 0.0, 0.0)
    assert parse_event("1, 2, 3, 4e-6", "events.a").time_s == 4e-6
    with pytest.raises(ConfigError):
        parse_event("1, 2, 3", "events.a")


def test_load_config_sections(tmp_path):
    p = tmp_path / "c.ini"
    p.write_text("[run]\nseed = 9\ntruth_pairs = no\n[station_a]\nangles_rad = 0, pi/4\n"
                 "[bound]\nbeta = 0.9\n[analysis]\nn_windows = 26\nspan_s = 43200\n")
    cfg = load_config(p)
    assert cfg.seed == 9 and cfg.truth_pairs is False
    assert cfg.station_a.angles_rad == pytest.approx((0.0, math.pi / 4))
    assert cfg.bound.beta == 0.9 and cfg.analysis.n_windows == 26
    assert len(cfg.sha256) == 64


def test_defaults_and_missing_events():
    cfg = load_config(None)
    assert cfg.bound.rho == 6.84e-6 and cfg.analysis.T_s == 1800.0
    with pytest.raises(ConfigError) as info:
        require_events(cfg)
    assert info.value.field == "events"


def test_integer_field(tmp_path):
    p = tmp_path / "c.ini"
    p.write_text("[analysis]\nwindow_ps = 2.5\n")
    with pytest.raises(ConfigError) as info:
        load_config(p)
    assert info.value.field == "analysis.window_ps"
