"""QRNG-driven basis choices on a regular dwell grid.

Setting ``k`` is chosen at true time ``k * dwell`` and governs detections
during ``[k * dwell + electronic_delay, (k + 1) * dwell + electronic_delay)``.
Choices come from a counter-based generator (splitmix64 of the choice index
mixed with a per-station key) so that any detection time can be looked up
without materializing 10^10 choices for a 12-hour run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .config import StationConfig

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def _splitmix64(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = x + _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
        return z ^ (z >> np.uint64(31))


@dataclass(frozen=True)
class SettingSchedule:
    key: int
    dwell_ps: int
    delay_ps: int
    forced: int | None = None

    @classmethod
    def from_config(cls, cfg: StationConfig, key: int):
        return cls(int(key) & 0xFFFFFFFFFFFFFFFF, int(round(cfg.setting_dwell_s * 1e12)),
                   int(round(cfg.electronic_delay_s * 1e12)), cfg.forced_setting)

    @classmethod
    def from_rng(cls, cfg: StationConfig, rng: np.random.Generator):
        return cls.from_config(cfg, int(rng.integers(0, 2**63)))

    def choices(self, k) -> np.ndarray:
        """Setting chosen at grid index ``k`` (array of int64)."""
        k = np.asarray(k, dtype=np.int64)
        if self.forced is not None:
            return np.full(k.shape, self.forced, dtype=np.uint8)
        with np.errstate(over="ignore"):
            x = np.uint64(self.key) + k.astype(np.uint64) * _GOLDEN
        return (_splitmix64(x) >> np.uint64(63)).astype(np.uint8)

    def setting_at(self, t_ps) -> np.ndarray:
        """Setting in force at true detection time ``t_ps`` (integer picoseconds)."""
        t = np.asarray(t_ps, dtype=np.int64)
        return self.choices((t - self.delay_ps) // self.dwell_ps)


class SettingStream(NamedTuple):
    choice_times_s: np.ndarray
    settings: np.ndarray
    schedule: SettingSchedule


def generate_setting_stream(cfg: StationConfig, duration_s: float, rng: np.random.Generator,
                            schedule: SettingSchedule | None = None) -> SettingStream:
    """Materialize the choices made during ``[0, duration_s)``."""
    if schedule is None:
        schedule = SettingSchedule.from_rng(cfg, rng)
    ratio = duration_s / cfg.setting_dwell_s
    n = int(round(ratio)) if abs(ratio - round(ratio)) < 1e-9 * max(1.0, ratio) else math.ceil(ratio)
    k = np.arange(n, dtype=np.int64)
    return SettingStream(k * cfg.setting_dwell_s, schedule.choices(k), schedule)
