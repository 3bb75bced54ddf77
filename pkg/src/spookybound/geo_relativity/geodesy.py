"""Geodetic site coordinates and the Earth-centered baseline geometry."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import constants
from ..errors import DomainError

EARTH_MODELS = ("sphere", "ellipsoid")


def dms_to_deg(degrees, minutes=0.0, seconds=0.0):
    """Convert a degrees/minutes/seconds triple to decimal degrees."""
    sign = -1.0 if degrees < 0 else 1.0
    return sign * (abs(degrees) + minutes / 60.0 + seconds / 3600.0)


@dataclass(frozen=True)
class GeodeticPoint:
    latitude_deg: float
    longitude_deg: float
    altitude_m: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.latitude_deg) and -90.0 <= self.latitude_deg <= 90.0):
            raise DomainError(f"latitude {self.latitude_deg} outside [-90, 90]")
        if not (math.isfinite(self.longitude_deg) and -180.0 <= self.longitude_deg <= 180.0):
            raise DomainError(f"longitude {self.longitude_deg} outside [-180, 180]")
        if not math.isfinite(self.altitude_m):
            raise DomainError("altitude must be finite")

    @classmethod
    def from_dms(cls, lat_dms, lon_dms, altitude_m=0.0):
        return cls(dms_to_deg(*lat_dms), dms_to_deg(*lon_dms), altitude_m)


def geodetic_to_earth_frame(p: GeodeticPoint, model: str = "ellipsoid") -> np.ndarray:
    """Earth-centered Cartesian position of ``p`` in meters.

    Axes: +Z along the rotation axis (north), +X through longitude 0.
    ``model`` is ``"sphere"`` (R = 6371 km) or ``"ellipsoid"`` (WGS84).
    """
    if not isinstance(p, GeodeticPoint):
        raise DomainError("expected a GeodeticPoint")
    lat = math.radians(p.latitude_deg)
    lon = math.radians(p.longitude_deg)
    slat, clat = math.sin(lat), math.cos(lat)
    slon, clon = math.sin(lon), math.cos(lon)
    if model == "sphere":
        r = constants.SPHERE_RADIUS_M + p.altitude_m
        return np.array([r * clat * clon, r * clat * slon, r * slat])
    if model == "ellipsoid":
        a = constants.WGS84_A_M
        e2 = constants.WGS84_F * (2.0 - constants.WGS84_F)
        n = a / math.sqrt(1.0 - e2 * slat * slat)
        h = p.altitude_m
        return np.array([
            (n + h) * clat * clon,
            (n + h) * clat * slon,
            (n * (1.0 - e2) + h) * slat,
        ])
    raise DomainError(f"unknown earth model {model!r}; expected one of {EARTH_MODELS}")


@dataclass(frozen=True)
class BaselineGeometry:
    """Two receiving stations and the source, Earth-centered coordinates (m).

    ``alpha_rad`` is the angle between the A-B axis and the equatorial plane,
    so an exactly east-west baseline has ``alpha_rad == 0``.
    """

    station_a: tuple
    station_b: tuple
    source: tuple
    separation_m: float
    alpha_rad: float

    @classmethod
    def from_positions(cls, station_a, station_b, source=None):
        ra = np.asarray(station_a, dtype=float)
        rb = np.asarray(station_b, dtype=float)
        rs = (ra + rb) / 2.0 if source is None else np.asarray(source, dtype=float)
        for name, r in (("station_a", ra), ("station_b", rb), ("source", rs)):
            if r.shape != (3,) or not np.all(np.isfinite(r)):
                raise DomainError(f"{name} must be a finite 3-vector")
        d = rb - ra
        sep = float(np.linalg.norm(d))
        if sep == 0.0:
            raise DomainError("stations coincide")
        alpha = math.asin(max(-1.0, min(1.0, d[2] / sep)))
        return cls(tuple(map(float, ra)), tuple(map(float, rb)), tuple(map(float, rs)), sep, alpha)

    @classmethod
    def from_geodetic(cls, a: GeodeticPoint, b: GeodeticPoint, source: GeodeticPoint | None = None,
                      model: str = "ellipsoid"):
        pos_s = None if source is None else geodetic_to_earth_frame(source, model)
        return cls.from_positions(geodetic_to_earth_frame(a, model),
                                  geodetic_to_earth_frame(b, model), pos_s)

    @property
    def axis(self) -> np.ndarray:
        d = np.subtract(self.station_b, self.station_a)
        return d / np.linalg.norm(d)


def experiment_sites(altitude_m: float = constants.DEFAULT_SITE_ALTITUDE_M):
    """The two receiving sites and the source as reported for the experiment."""
    a = GeodeticPoint.from_dms(*constants.SITE_A_DMS, altitude_m=altitude_m)
    b = GeodeticPoint.from_dms(*constants.SITE_B_DMS, altitude_m=altitude_m)
    s = GeodeticPoint.from_dms(*constants.SOURCE_DMS, altitude_m=altitude_m)
    return a, b, s


def experiment_geometry(model: str = "ellipsoid",
                        altitude_m: float = constants.DEFAULT_SITE_ALTITUDE_M) -> BaselineGeometry:
    a, b, s = experiment_sites(altitude_m)
    return BaselineGeometry.from_geodetic(a, b, s, model=model)
