"""Source and station configuration for the time-tag simulator."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

from .. import constants
from ..errors import ConfigError


def _finite_nonneg(obj, name):
    v = getattr(obj, name)
    if not (isinstance(v, (int, float)) and math.isfinite(v) and v >= 0):
        raise ConfigError(name, f"must be a finite non-negative number, got {v!r}")


@dataclass(frozen=True)
class SourceConfig:
    # Desk-scale default; the experiment ran at 550 kHz.
    pair_rate_hz: float = 5_000.0
    visibility: float = constants.VISIBILITY
    duration_s: float = 1.0
    sync_rate_hz: float = constants.SYNC_RATE_HZ

    def __post_init__(self):
        for name in ("pair_rate_hz", "duration_s", "sync_rate_hz"):
            _finite_nonneg(self, name)
            if getattr(self, name) == 0:
                raise ConfigError(name, "must be positive")
        if not (0.0 <= self.visibility <= 1.0):
            raise ConfigError("visibility", f"must lie in [0, 1], got {self.visibility!r}")

    @property
    def sync_period_ps(self) -> int:
        return int(round(1e12 / self.sync_rate_hz))


@dataclass(frozen=True)
class StationConfig:
    optical_delay_s: float = constants.DIAGRAM_MEASUREMENT_TIME_S
    # QRNG -> EOM delay: a choice at 23.1 us governs detections at 26.1 us.
    electronic_delay_s: float = constants.DIAGRAM_MEASUREMENT_TIME_S - constants.DIAGRAM_SETTING_TIME_S
    setting_dwell_s: float = 1e-6
    # sqrt(2) * 148 ps * 2.355 ~ 490 ps FWHM, sigma of the A-B difference ~ 210 ps.
    detector_jitter_sigma_s: float = 148e-12
    efficiency: float = 0.25
    dark_rate_hz: float = 200.0
    tdc_resolution_s: float = 10e-12
    clock_offset_s: float = 0.0
    clock_drift_s_per_s: float = 0.0
    sync_jitter_sigma_s: float = 20e-12
    forced_setting: int | None = None
    angles_rad: tuple | None = None  # analyzer angle per setting index; None = optimal CHSH

    def __post_init__(self):
        for name in ("optical_delay_s", "electronic_delay_s", "setting_dwell_s",
                     "detector_jitter_sigma_s", "dark_rate_hz", "tdc_resolution_s",
                     "clock_offset_s", "sync_jitter_sigma_s"):
            _finite_nonneg(self, name)
        if not (0.0 <= self.efficiency <= 1.0):
            raise ConfigError("efficiency", f"must lie in [0, 1], got {self.efficiency!r}")
        res_ps = self.tdc_resolution_s * 1e12
        if res_ps < 1 or abs(res_ps - round(res_ps)) > 1e-6:
            raise ConfigError("tdc_resolution_s", "must be a whole number of picoseconds >= 1 ps")
        if self.setting_dwell_s < self.tdc_resolution_s:
            raise ConfigError("setting_dwell_s", "must not be shorter than tdc_resolution_s")
        if not (math.isfinite(self.clock_drift_s_per_s) and abs(self.clock_drift_s_per_s) < 1e-3):
            raise ConfigError("clock_drift_s_per_s", "must be finite with magnitude below 1e-3")
        if self.forced_setting not in (None, 0, 1):
            raise ConfigError("forced_setting", "must be 0, 1 or unset")
        if self.angles_rad is not None:
            if len(self.angles_rad) != 2 or not all(math.isfinite(x) for x in self.angles_rad):
                raise ConfigError("angles_rad", "must be two finite angles")
            object.__setattr__(self, "angles_rad", tuple(float(x) for x in self.angles_rad))

    @property
    def tdc_resolution_ps(self) -> int:
        return int(round(self.tdc_resolution_s * 1e12))

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]
