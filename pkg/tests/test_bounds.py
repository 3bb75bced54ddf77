import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spookybound.constants import C, OMEGA_EARTH
from spookybound.errors import DomainError, PreconditionError, UsageError
from spookybound.geo_relativity import (
    BaselineGeometry,
    FrameVelocity,
    SpacetimeEvent,
    alignment_rho,
    beta_parallel,
    rho_from_separation,
    speed_bound_earth_frame,
    speed_bound_in_frame,
    speed_bound_optimal,
    sweep_bound,
    write_sweep_csv,
)

EW = BaselineGeometry.from_positions((0, -1, 0), (0, 1, 0))


def _pair(dist, dt):
    return SpacetimeEvent.on_axis(0.0, 0.0), SpacetimeEvent.on_axis(dist, dt)


def test_rho_reported_value():
    assert alignment_rho(*_pair(15.35e3, 350e-12)) == pytest.approx(6.84e-6, rel=5e-3)


def test_rho_simultaneous():
    assert alignment_rho(*_pair(100.0, 0.0)) == 0.0


def test_rho_hand_check():
    # c * 5e-8 / 15
    assert alignment_rho(*_pair(15.0, 50e-9)) == pytest.approx(0.99930819333333333333, rel=1e-14)


def test_rho_rejects_timelike():
    with pytest.raises(DomainError):
        alignment_rho(*_pair(1.0, 1e-6))
    with pytest.raises(DomainError):
        rho_from_separation(1e-6, 1.0)


def test_beta_parallel_east_west():
    v = FrameVelocity(1e-3, 0.7)
    assert beta_parallel(v, EW, 0.0) == pytest.approx(1e-3 * math.sin(0.7), rel=1e-15)
    v2 = FrameVelocity(1e-3, math.pi / 2)
    assert beta_parallel(v2, EW, math.pi / 2 / OMEGA_EARTH) == pytest.approx(0.0, abs=1e-18)


def test_beta_parallel_tilted_oracle():
    geom = BaselineGeometry.from_positions((0, 0, 0), (math.cos(0.1), 0, math.sin(0.1)))
    assert geom.alpha_rad == pytest.approx(0.1)
    out = beta_parallel(FrameVelocity(1e-3, 1.0), geom, 3600.0)
    assert out == pytest.approx(0.00086252263881218389665, rel=1e-12)


def test_in_frame_bound():
    assert speed_bound_in_frame(*_pair(15.35e3, 350e-12)) == pytest.approx(146291.68175118954174, rel=1e-13)
    assert speed_bound_in_frame(*_pair(C * 1e-6, 1e-6)) == pytest.approx(1.0, rel=1e-15)
    assert speed_bound_in_frame(*_pair(10.0, 0.0)) == math.inf


@pytest.mark.parametrize("rho", [1e-6, 6.84e-6, 0.01, 0.5])
def test_earth_frame_beta_zero_collapses(rho):
    assert speed_bound_earth_frame(rho, FrameVelocity(0.0), 0.0) == pytest.approx(1 / rho, rel=1e-12)


def test_earth_frame_lightlike_alignment():
    assert speed_bound_earth_frame(1 - 1e-12, FrameVelocity(0.5), 0.1) == pytest.approx(1.0, abs=1e-5)


def test_earth_frame_oracle():
    assert speed_bound_earth_frame(6.84e-6, FrameVelocity(1e-3), 6.56e-5) == pytest.approx(
        13804.52101877775152, rel=1e-12)


def test_earth_frame_infinite():
    assert speed_bound_earth_frame(0.0, FrameVelocity(0.1), 0.0) == math.inf


def test_optimal_reported_values():
    r = speed_bound_optimal(6.84e-6, FrameVelocity(1e-3, math.pi / 2), 1800.0)
    assert r.bound_over_c == pytest.approx(1.38e4, rel=0.01)
    assert r.bound_over_c == pytest.approx(13798.988641570246222, rel=1e-12)
    r9 = speed_bound_optimal(6.84e-6, FrameVelocity(0.9, math.pi / 2), 1800.0)
    assert 7.0 <= r9.bound_over_c <= 7.5
    assert (r.rho, r.beta, r.theta_rad, r.period_T_s) == (6.84e-6, 1e-3, math.pi / 2, 1800.0)


def test_optimal_beta_zero():
    assert speed_bound_optimal(1e-4, FrameVelocity(0.0), 1800.0).bound_over_c == pytest.approx(1e4, rel=1e-9)


def test_optimal_rotation_precondition():
    with pytest.raises(PreconditionError):
        speed_bound_optimal(1e-5, FrameVelocity(0.1), 0.5 / OMEGA_EARTH)
    with pytest.warns(UserWarning):
        speed_bound_optimal(1e-5, FrameVelocity(0.1), 0.3 / OMEGA_EARTH)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        speed_bound_optimal(1e-5, FrameVelocity(0.1), 1800.0)


@pytest.mark.parametrize("theta", [0.3, 1.0, math.pi / 2])
@pytest.mark.parametrize("beta", [1e-4, 1e-3, 0.5])
def test_rotation_sweep_consistency(beta, theta):
    # Period of length T centred on the zero crossing omega t = pi/2 of beta_par.
    rho, T = 6.84e-6, 1800.0
    v = FrameVelocity(beta, theta)
    opt = speed_bound_optimal(rho, v, T).bound_over_c
    t0 = math.pi / 2 / OMEGA_EARTH
    gaps = []
    for n in (11, 101, 1001, 10001):
        t = t0 + np.linspace(-T / 2, T / 2, n)
        worst = float(np.min(speed_bound_earth_frame(rho, v, beta_parallel(v, EW, t))))
        assert worst >= opt
        gaps.append(worst - opt)
    limit = float(speed_bound_earth_frame(rho, v, beta * math.sin(theta) * math.sin(OMEGA_EARTH * T / 2)))
    assert gaps[-1] == pytest.approx(limit - opt, rel=1e-9, abs=1e-12)
    assert (limit - opt) / opt < (OMEGA_EARTH * T) ** 2 / 12


@given(st.floats(1e-8, 0.5), st.floats(1e-8, 0.5), st.floats(0.0, 0.99), st.floats(0.05, math.pi / 2))
def test_monotone_in_rho(r1, r2, beta, theta):
    lo, hi = sorted((r1, r2))
    if hi - lo < 1e-9 * hi:  # below what a double-precision bound can resolve
        return
    v = FrameVelocity(beta, theta)
    assert speed_bound_optimal(lo, v, 1800.0).bound_over_c > speed_bound_optimal(hi, v, 1800.0).bound_over_c


@given(st.floats(1e-4, 0.98), st.floats(0.01, math.pi / 2 - 0.01))
def test_monotone_in_projected_speed(beta, theta):
    # Increase |beta sin theta| through theta at fixed beta.
    v1, v2 = FrameVelocity(beta, theta), FrameVelocity(beta, min(theta + 0.01, math.pi / 2))
    assert speed_bound_optimal(6.84e-6, v1, 1800.0).bound_over_c > speed_bound_optimal(
        6.84e-6, v2, 1800.0).bound_over_c


def test_sweep_reproduces_headline_and_minimum():
    res = sweep_bound(6.84e-6, 1800.0, [1e-3], [math.pi / 2])
    assert len(res) == 1 and res[0].bound_over_c == pytest.approx(1.38e4, rel=0.01)
    thetas = np.linspace(0, math.pi, 49)
    betas = np.linspace(0, 0.99, 20)
    grid = np.array([r.bound_over_c for r in sweep_bound(6.84e-6, 1800.0, betas, thetas)]).reshape(20, 49)
    assert np.all(grid > 1)
    assert np.all(grid >= grid[:, [24]])
    # Exhaustive check against the closed form, monotone in |sin theta|.
    for i, b in enumerate(betas):
        expected = [speed_bound_optimal(6.84e-6, FrameVelocity(b, th), 1800.0).bound_over_c for th in thetas]
        np.testing.assert_allclose(grid[i], expected, rtol=1e-13)


def test_sweep_grid_validation():
    with pytest.raises(UsageError):
        sweep_bound(1e-5, 1800.0, [], [1.0])
    with pytest.raises(UsageError):
        sweep_bound(1e-5, 1800.0, [0.1, 0.1], [1.0])


def test_sweep_csv(tmp_path):
    res = sweep_bound(6.84e-6, 1800.0, [1e-3, 0.9], [math.pi / 2])
    path = tmp_path / "s.csv"
    with open(path, "w") as fh:
        write_sweep_csv(fh, res, comment="seed=1")
    lines = path.read_text().splitlines()
    assert lines[0] == "# seed=1"
    assert lines[1] == "beta,theta_rad,rho,T_s,bound_over_c"
    assert len(lines) == 4
    assert float(lines[3].split(",")[-1]) == pytest.approx(7.4462902614180129946, rel=1e-12)
