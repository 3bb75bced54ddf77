import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spookybound.errors import DomainError
from spookybound.quantum_model import (
    NoisySingletState,
    PolarizationSetting,
    analytic_chsh,
    chsh_value,
    correlation,
    optimal_settings,
    sample_outcome,
    sample_outcomes,
)

angles = st.floats(-10, 10, allow_nan=False)


def test_perfect_anticorrelation():
    assert correlation(NoisySingletState(1.0), PolarizationSetting(0.3), PolarizationSetting(0.3)) == -1.0


def test_orthogonal_bases_uncorrelated():
    assert correlation(NoisySingletState(1.0), 0.0, math.pi / 4) == pytest.approx(0.0, abs=1e-16)


def test_noisy_correlation():
    assert correlation(NoisySingletState(0.913), 0.0, math.pi / 8) == pytest.approx(
        -0.64558849122331788978, rel=1e-14)


def test_sample_equal_settings_always_anticorrelated(rng):
    oa, ob = sample_outcomes(NoisySingletState(1.0), 0.2, 0.2, rng, size=10_000)
    assert np.all(oa * ob == -1)
    pair = sample_outcome(NoisySingletState(1.0), PolarizationSetting(0.2), PolarizationSetting(0.2), rng)
    assert pair.outcome_a == -pair.outcome_b


def test_sample_white_noise(rng):
    n = 100_000
    oa, ob = sample_outcomes(NoisySingletState(0.0), 0.0, 0.0, rng, size=n)
    assert abs(np.mean(oa.astype(float) * ob)) < 4 / math.sqrt(n)


def test_sample_matches_analytic(rng):
    n = 100_000
    state = NoisySingletState(0.913)
    st_ = optimal_settings()
    for sa in (st_.a, st_.a_prime):
        for sb in (st_.b, st_.b_prime):
            oa, ob = sample_outcomes(state, sa.angle_rad, sb.angle_rad, rng, size=n)
            e = float(np.mean(oa.astype(float) * ob))
            exact = float(correlation(state, sa, sb))
            se = math.sqrt((1 - exact ** 2) / n)
            assert abs(e - exact) < 4 * se
            assert abs(oa.mean()) < 4 / math.sqrt(n)
            assert abs(ob.mean()) < 4 / math.sqrt(n)


def test_chsh_ideal_and_noisy():
    assert analytic_chsh(NoisySingletState(1.0)) == pytest.approx(2 * math.sqrt(2), abs=1e-12)
    assert analytic_chsh(NoisySingletState(0.913)) == pytest.approx(2.5823539648932715591, abs=1e-12)
    assert analytic_chsh(NoisySingletState(1 / math.sqrt(2))) == pytest.approx(2.0, abs=1e-12)
    assert chsh_value(0, 0, 0, 0) == 0


def test_all_plus_signs_give_sqrt2():
    # The all-plus combination at the same angles only reaches sqrt(2).
    assert analytic_chsh(NoisySingletState(1.0), signs=(1, 1, 1, 1)) == pytest.approx(math.sqrt(2))


def test_optimal_settings_constants():
    s = optimal_settings()
    assert s.a.angle_rad == 0.0
    assert s.a_prime.angle_rad == pytest.approx(math.pi / 4, abs=1e-15)
    assert s.b.angle_rad == pytest.approx(math.pi / 8, abs=1e-15)
    assert s.b_prime.angle_rad == pytest.approx(-math.pi / 8, abs=1e-15)


def test_chsh_input_range():
    with pytest.raises(DomainError):
        chsh_value(1.5, 0, 0, 0)
    with pytest.raises(DomainError):
        NoisySingletState(1.2)


@given(st.floats(0, 1), angles, angles)
def test_correlation_bounded_by_visibility(v, a, b):
    assert abs(correlation(NoisySingletState(v), a, b)) <= v + 1e-15


@given(st.floats(0, 1), angles, angles, angles)
def test_rotation_invariance(v, a, b, phi):
    s = NoisySingletState(v)
    assert correlation(s, a + phi, b + phi) == pytest.approx(correlation(s, a, b), abs=1e-9)


@given(st.floats(0, 1), st.floats(0, 1))
def test_chsh_linear_in_visibility(v, k):
    assert analytic_chsh(NoisySingletState(v * k)) == pytest.approx(k * analytic_chsh(NoisySingletState(v)),
                                                                     abs=1e-12)


def test_equality_at_aligned_bases():
    s = NoisySingletState(0.8)
    assert abs(correlation(s, 0.1, 0.1 + math.pi / 2)) == pytest.approx(0.8)


def test_tsirelson_grid():
    grid = np.linspace(0, math.pi, 100)
    s = NoisySingletState(1.0)
    E = correlation(s, grid[:, None], grid[None, :])  # E[i, j] for A angle i, B angle j
    # For each pair (a, a') and (b, b') on the grid: S <= 2 sqrt(2).
    # Evaluate max over a' given a and b, b' via broadcasting in blocks.
    worst = 0.0
    for i in range(0, 100, 3):
        for k in range(0, 100, 3):
            e_ab = E[i][:, None]        # b
            e_abp = E[i][None, :]       # b'
            e_apb = E[k][:, None]
            e_apbp = E[k][None, :]
            S = np.abs(e_ab + e_apb + e_abp - e_apbp)
            worst = max(worst, float(S.max()))
    assert worst <= 2 * math.sqrt(2) + 1e-12
    assert worst > 2.8


def test_canonical_angle():
    assert PolarizationSetting(math.pi + 0.1).angle_rad == pytest.approx(0.1)
    assert PolarizationSetting(-math.pi / 2).angle_rad == pytest.approx(-math.pi / 2)
