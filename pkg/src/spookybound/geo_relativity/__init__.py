"""Coordinates, Lorentz kinematics, speed bounds and loophole verification."""

from .bounds import (
    SpeedBoundResult,
    alignment_rho,
    beta_parallel,
    rho_from_separation,
    speed_bound_earth_frame,
    speed_bound_in_frame,
    speed_bound_optimal,
    sweep_bound,
    write_sweep_csv,
)
from .geodesy import (
    BaselineGeometry,
    GeodeticPoint,
    dms_to_deg,
    experiment_geometry,
    experiment_sites,
    geodetic_to_earth_frame,
)
from .loopholes import LoopholeReport, experiment_events, verify_loopholes, write_report_csv
from .spacetime import (
    EARTH_FRAME,
    FrameVelocity,
    IntervalClass,
    Separation,
    SpacetimeEvent,
    classify_interval,
    invariant_interval,
    lorentz_boost,
)

__all__ = [
    "EARTH_FRAME", "BaselineGeometry", "FrameVelocity", "GeodeticPoint", "IntervalClass",
    "LoopholeReport", "Separation", "SpacetimeEvent", "SpeedBoundResult", "alignment_rho",
    "beta_parallel", "classify_interval", "dms_to_deg", "experiment_events", "experiment_geometry",
    "experiment_sites", "geodetic_to_earth_frame", "invariant_interval", "lorentz_boost",
    "rho_from_separation", "speed_bound_earth_frame", "speed_bound_in_frame", "speed_bound_optimal",
    "sweep_bound", "verify_loopholes", "write_report_csv", "write_sweep_csv",
]
