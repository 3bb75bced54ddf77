"""Polarization correlations of a noisy two-photon singlet and the CHSH value.

The state is a singlet fraction ``V`` mixed with white noise, so the
correlation for analyzer angles (a, b) is ``E = -V cos 2(a - b)``.
Outcome +1 means the photon was transmitted by the PBS (channel 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError

DEFAULT_CHSH_SIGNS = (1, 1, 1, -1)


def _canonical_angle(angle):
    # Polarizers are pi-periodic; map into [-pi/2, pi/2).
    return math.fmod(math.fmod(angle + math.pi / 2, math.pi) + math.pi, math.pi) - math.pi / 2


@dataclass(frozen=True)
class PolarizationSetting:
    angle_rad: float

    def __post_init__(self):
        if not math.isfinite(self.angle_rad):
            raise DomainError("analyzer angle must be finite")
        object.__setattr__(self, "angle_rad", _canonical_angle(float(self.angle_rad)))


@dataclass(frozen=True)
class NoisySingletState:
    visibility: float = 1.0

    def __post_init__(self):
        if not (0.0 <= self.visibility <= 1.0):
            raise DomainError(f"visibility must lie in [0, 1], got {self.visibility}")


class OutcomePair(NamedTuple):
    outcome_a: int
    outcome_b: int


@dataclass(frozen=True)
class ChshSettings:
    a: PolarizationSetting
    a_prime: PolarizationSetting
    b: PolarizationSetting
    b_prime: PolarizationSetting

    def station_angles(self):
        """(angles at A indexed by setting, angles at B indexed by setting)."""
        return ((self.a.angle_rad, self.a_prime.angle_rad),
                (self.b.angle_rad, self.b_prime.angle_rad))


def optimal_settings() -> ChshSettings:
    return ChshSettings(PolarizationSetting(0.0), PolarizationSetting(math.pi / 4),
                        PolarizationSetting(math.pi / 8), PolarizationSetting(-math.pi / 8))


def _angle(s):
    return s.angle_rad if isinstance(s, PolarizationSetting) else s


def correlation(state: NoisySingletState, sa, sb):
    """Analytic E(a, b). ``sa``/``sb`` may be settings, floats or arrays of angles."""
    return -state.visibility * np.cos(2.0 * (np.asarray(_angle(sa), dtype=float)
                                              - np.asarray(_angle(sb), dtype=float)))


def sample_outcomes(state: NoisySingletState, angle_a, angle_b, rng: np.random.Generator, size=None):
    """Vectorized joint outcomes; returns (outcome_a, outcome_b) int8 arrays of +-1.

    Each side's marginal is uniform; the product is -1 with probability
    (1 + V cos 2(a - b)) / 2.
    """
    angle_a = np.asarray(angle_a, dtype=float)
    angle_b = np.asarray(angle_b, dtype=float)
    if size is None:
        size = np.broadcast(angle_a, angle_b).shape
    p_anti = 0.5 * (1.0 + state.visibility * np.cos(2.0 * (angle_a - angle_b)))
    out_a = np.where(rng.random(size) < 0.5, 1, -1).astype(np.int8)
    anti = rng.random(size) < p_anti
    out_b = np.where(anti, -out_a, out_a).astype(np.int8)
    return out_a, out_b


def sample_outcome(state: NoisySingletState, sa, sb, rng: np.random.Generator) -> OutcomePair:
    oa, ob = sample_outcomes(state, _angle(sa), _angle(sb), rng, size=())
    return OutcomePair(int(oa), int(ob))


def chsh_value(e_ab, e_apb, e_abp, e_apbp, signs=DEFAULT_CHSH_SIGNS) -> float:
    """S = |s1 E(a,b) + s2 E(a',b) + s3 E(a,b') + s4 E(a',b')|.

    The default signs put the minus on E(a', b'), which reaches 2 sqrt(2) at
    the optimal angles of ``optimal_settings``.
    """
    es = (e_ab, e_apb, e_abp, e_apbp)
    for e in es:
        if not (-1.0 - 1e-12 <= e <= 1.0 + 1e-12):
            raise DomainError(f"correlation {e} outside [-1, 1]")
    return abs(sum(s * e for s, e in zip(signs, es)))


def analytic_chsh(state: NoisySingletState, settings: ChshSettings | None = None,
                  signs=DEFAULT_CHSH_SIGNS) -> float:
    st = optimal_settings() if settings is None else settings
    return chsh_value(float(correlation(state, st.a, st.b)),
                      float(correlation(state, st.a_prime, st.b)),
                      float(correlation(state, st.a, st.b_prime)),
                      float(correlation(state, st.a_prime, st.b_prime)), signs)
