"""Speed bounds attached to intervals that violate the CHSH inequality."""

from __future__ import annotations

from dataclasses import dataclass

from ..constants import OMEGA_EARTH
from ..geo_relativity import BaselineGeometry, FrameVelocity, SpeedBoundResult, speed_bound_optimal


@dataclass(frozen=True)
class BoundTimeline:
    per_interval: tuple  # SpeedBoundResult, or None for a non-violating interval
    summary: SpeedBoundResult | None

    @property
    def conclusive(self) -> bool:
        return self.summary is not None

    @property
    def n_violating(self) -> int:
        return sum(r is not None for r in self.per_interval)


def is_violating(interval, min_sigmas: float = 0.0) -> bool:
    v = interval.violation_sigmas
    return v is not None and v > min_sigmas


def bound_timeline(intervals, geom: BaselineGeometry, rho: float, v: FrameVelocity,
                   period_T_s: float | None = None, omega: float = OMEGA_EARTH,
                   min_sigmas: float = 0.0) -> BoundTimeline:
    """One bound per violating interval; ``summary`` is None when nothing violates.

    The summary is the bound that holds over the full rotation sweep, which
    depends only on the interval length T, not on which interval it came from.
    """
    per = []
    for iv in intervals:
        if is_violating(iv, min_sigmas):
            T = period_T_s if period_T_s is not None else iv.end_s - iv.start_s
            per.append(speed_bound_optimal(rho, v, T, omega=omega, alpha_rad=geom.alpha_rad))
        else:
            per.append(None)
    summary = None
    if any(r is not None for r in per):
        T = period_T_s if period_T_s is not None else max(r.period_T_s for r in per if r is not None)
        summary = speed_bound_optimal(rho, v, T, omega=omega, alpha_rad=geom.alpha_rad)
    return BoundTimeline(tuple(per), summary)
