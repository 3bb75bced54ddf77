"""Events, inertial-frame velocities, Lorentz boosts and interval classification."""

from __future__ import annotations

import enum
import math
import sys
from dataclasses import dataclass

import numpy as np

from ..constants import C
from ..errors import DomainError, UsageError

EARTH_FRAME = "earth"


@dataclass(frozen=True)
class SpacetimeEvent:
    position_m: tuple
    time_s: float
    frame_id: str = EARTH_FRAME

    def __post_init__(self):
        pos = tuple(float(x) for x in np.asarray(self.position_m, dtype=float).ravel())
        if len(pos) != 3 or not all(math.isfinite(x) for x in pos):
            raise DomainError("position_m must be a finite 3-vector")
        if not math.isfinite(self.time_s):
            raise DomainError("time_s must be finite")
        if not self.frame_id:
            raise DomainError("frame_id must be non-empty")
        object.__setattr__(self, "position_m", pos)
        object.__setattr__(self, "time_s", float(self.time_s))

    @classmethod
    def on_axis(cls, x_m, t_s, frame_id=EARTH_FRAME):
        """Event on the X axis, the usual one-dimensional space-time diagram."""
        return cls((x_m, 0.0, 0.0), t_s, frame_id)

    @property
    def r(self) -> np.ndarray:
        return np.array(self.position_m)


@dataclass(frozen=True)
class FrameVelocity:
    """Velocity of an inertial frame: speed fraction plus polar/azimuth angles.

    ``theta_rad`` is measured from the Earth-frame Z axis, ``azimuth_rad``
    from +X in the equatorial plane.
    """

    beta: float
    theta_rad: float = math.pi / 2
    azimuth_rad: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.beta) and 0.0 <= self.beta < 1.0):
            raise DomainError(f"beta must lie in [0, 1), got {self.beta}")
        if not (math.isfinite(self.theta_rad) and 0.0 <= self.theta_rad <= math.pi):
            raise DomainError(f"theta_rad must lie in [0, pi], got {self.theta_rad}")
        if not math.isfinite(self.azimuth_rad):
            raise DomainError("azimuth_rad must be finite")

    @property
    def direction(self) -> np.ndarray:
        st = math.sin(self.theta_rad)
        return np.array([st * math.cos(self.azimuth_rad),
                         st * math.sin(self.azimuth_rad),
                         math.cos(self.theta_rad)])

    @property
    def gamma(self) -> float:
        return 1.0 / math.sqrt(1.0 - self.beta * self.beta)

    def reversed(self) -> "FrameVelocity":
        return FrameVelocity(self.beta, math.pi - self.theta_rad,
                             math.fmod(self.azimuth_rad + math.pi, 2.0 * math.pi))

    @classmethod
    def from_vector(cls, beta_vec):
        b = np.asarray(beta_vec, dtype=float)
        beta = float(np.linalg.norm(b))
        if beta == 0.0:
            return cls(0.0)
        theta = math.acos(max(-1.0, min(1.0, b[2] / beta)))
        return cls(beta, theta, math.atan2(b[1], b[0]))


def lorentz_boost(e: SpacetimeEvent, v: FrameVelocity, frame_id: str | None = None) -> SpacetimeEvent:
    """Coordinates of ``e`` in a frame moving with velocity ``v`` relative to e's frame.

    A frame moving at ``-v`` (the convention where the Earth center moves at
    ``+v``) is obtained with ``v.reversed()``.
    """
    if not isinstance(v, FrameVelocity):
        raise DomainError("expected a FrameVelocity")
    if v.beta == 0.0:
        return e if frame_id is None else SpacetimeEvent(e.position_m, e.time_s, frame_id)
    n = v.direction
    g = v.gamma
    r = e.r
    ct = C * e.time_s
    r_par = float(n @ r)
    ct_new = g * (ct - v.beta * r_par)
    r_new = r + ((g - 1.0) * r_par - g * v.beta * ct) * n
    if frame_id is None:
        frame_id = f"{e.frame_id}>boost({v.beta:.9g},{v.theta_rad:.9g},{v.azimuth_rad:.9g})"
    return SpacetimeEvent(tuple(r_new), ct_new / C, frame_id)


class Separation(enum.Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    LIGHTLIKE = "lightlike"


@dataclass(frozen=True)
class IntervalClass:
    kind: Separation
    invariant_interval_m2: float

    @property
    def spacelike(self) -> bool:
        return self.kind is Separation.SPACELIKE


def _require_same_frame(*events):
    frames = {ev.frame_id for ev in events}
    if len(frames) != 1:
        raise UsageError(f"events are expressed in different frames: {sorted(frames)}")


_EPS = sys.float_info.epsilon


def invariant_interval(a: SpacetimeEvent, b: SpacetimeEvent) -> float:
    """s^2 = |r_b - r_a|^2 - c^2 (t_b - t_a)^2, in m^2 (positive means spacelike)."""
    _require_same_frame(a, b)
    d = b.r - a.r
    cdt = C * (b.time_s - a.time_s)
    return float(d @ d - cdt * cdt)


def default_lightlike_tolerance(a: SpacetimeEvent, b: SpacetimeEvent) -> float:
    """(1 mm)^2, widened only as far as float rounding of s^2 requires.

    s^2 is invariant but any magnitude used to scale a tolerance is not, so
    the frame-dependent part is kept at the rounding level; classification
    then agrees across frames except within a few ulps of the boundary.
    """
    d = b.r - a.r
    cdt = C * (b.time_s - a.time_s)
    sep = math.sqrt(float(d @ d) + cdt * cdt)
    mag = max(math.hypot(*e.r, C * e.time_s) for e in (a, b))
    return max(1e-6, 64 * _EPS * sep * (sep + mag))


def classify_interval(a: SpacetimeEvent, b: SpacetimeEvent, tol_m2: float | None = None) -> IntervalClass:
    s2 = invariant_interval(a, b)
    tol = default_lightlike_tolerance(a, b) if tol_m2 is None else tol_m2
    if abs(s2) < tol:
        kind = Separation.LIGHTLIKE
    elif s2 > 0:
        kind = Separation.SPACELIKE
    else:
        kind = Separation.TIMELIKE
    return IntervalClass(kind, s2)
