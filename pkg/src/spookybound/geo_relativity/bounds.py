"""Lower bounds on the influence speed V_sa, expressed as V_sa / c.

The Earth-frame bound for a pair of space-like measurement events with
alignment factor ``rho`` seen from a frame L in which the Earth center moves
at speed ``beta`` (component ``beta_par`` along the baseline) is

    (V/c)^2 >= 1 + (1 - beta^2)(1 - rho^2) / (rho + |beta_par|)^2

and Earth rotation guarantees that within a measurement period T containing
the zero crossing of ``beta_par``, ``|beta_par| <= |beta sin(theta) omega T/2|``.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass

import numpy as np

from ..constants import C, OMEGA_EARTH
from ..errors import DomainError, PreconditionError, UsageError
from .geodesy import BaselineGeometry
from .spacetime import FrameVelocity, Separation, SpacetimeEvent, classify_interval, _require_same_frame

OMEGA_T_LIMIT = 0.5
OMEGA_T_WARN = 0.2


@dataclass(frozen=True)
class SpeedBoundResult:
    bound_over_c: float
    rho: float
    beta: float
    theta_rad: float
    period_T_s: float


def rho_from_separation(dt_s: float, distance_m: float) -> float:
    """Alignment factor c|dt| / distance, without constructing events."""
    if distance_m <= 0:
        raise DomainError("distance must be positive")
    rho = C * abs(dt_s) / distance_m
    if rho >= 1.0:
        raise DomainError(f"rho = {rho:.6g} >= 1: events are not space-like separated")
    return rho


def alignment_rho(a: SpacetimeEvent, b: SpacetimeEvent) -> float:
    _require_same_frame(a, b)
    cls = classify_interval(a, b)
    if cls.kind is not Separation.SPACELIKE:
        raise DomainError(f"alignment factor needs a space-like pair, got {cls.kind.value}")
    dist = float(np.linalg.norm(b.r - a.r))
    return C * abs(b.time_s - a.time_s) / dist


def beta_parallel(v: FrameVelocity, geom: BaselineGeometry, t_s, omega: float = OMEGA_EARTH):
    """Baseline-parallel component of beta at time ``t_s`` (scalar or array).

    ``t_s = 0`` is the instant the equatorial projection of v is aligned with
    the baseline.
    """
    a = geom.alpha_rad
    th = v.theta_rad
    return (v.beta * math.cos(th) * math.sin(a)
            + v.beta * math.sin(th) * math.cos(a) * np.cos(omega * np.asarray(t_s, dtype=float)))


def speed_bound_in_frame(a: SpacetimeEvent, b: SpacetimeEvent) -> float:
    """|r_b - r_a| / (c |t_b - t_a|) in the events' common frame; +inf if simultaneous."""
    _require_same_frame(a, b)
    dist = float(np.linalg.norm(b.r - a.r))
    cdt = C * abs(b.time_s - a.time_s)
    if cdt == 0.0:
        return math.inf
    return dist / cdt


def _check_rho(rho):
    if not (math.isfinite(rho) and 0.0 <= rho < 1.0):
        raise DomainError(f"rho must lie in [0, 1), got {rho}")


def _earth_bound(rho, beta, beta_par_abs):
    denom = rho + beta_par_abs
    with np.errstate(divide="ignore"):
        ratio = np.where(denom == 0.0, np.inf,
                         (1.0 - beta * beta) * (1.0 - rho * rho) / np.where(denom == 0.0, 1.0, denom) ** 2)
    return np.sqrt(1.0 + ratio)


def speed_bound_earth_frame(rho: float, v: FrameVelocity, beta_par) -> float:
    _check_rho(rho)
    bp = np.abs(np.asarray(beta_par, dtype=float))
    if np.any(bp > v.beta * (1 + 1e-12) + 1e-300):
        raise DomainError("|beta_par| cannot exceed beta")
    out = _earth_bound(rho, v.beta, bp)
    return float(out) if out.ndim == 0 else out


def _check_period(period_T_s, omega):
    if not (math.isfinite(period_T_s) and period_T_s > 0):
        raise DomainError("period_T_s must be positive")
    wt = omega * period_T_s
    if wt >= OMEGA_T_LIMIT:
        raise PreconditionError(
            f"omega*T = {wt:.3g} >= {OMEGA_T_LIMIT}: small-rotation argument does not hold")
    if wt > OMEGA_T_WARN:
        warnings.warn(f"omega*T = {wt:.3g} is not small; bound is approximate", stacklevel=3)


def speed_bound_optimal(rho: float, v: FrameVelocity, period_T_s: float,
                        omega: float = OMEGA_EARTH, alpha_rad: float = 0.0) -> SpeedBoundResult:
    """Bound valid in every frame of speed ``v.beta`` and polar angle ``v.theta_rad``.

    ``alpha_rad`` other than 0 adds the constant ``beta cos(theta) sin(alpha)``
    term to the worst-case ``|beta_par|`` (conservative for tilted baselines).
    """
    _check_rho(rho)
    _check_period(period_T_s, omega)
    bp = (abs(v.beta * math.cos(v.theta_rad) * math.sin(alpha_rad))
          + abs(v.beta * math.sin(v.theta_rad) * math.cos(alpha_rad) * omega * period_T_s / 2.0))
    bound = float(_earth_bound(rho, v.beta, bp))
    return SpeedBoundResult(bound, rho, v.beta, v.theta_rad, period_T_s)


def _check_grid(name, grid):
    g = np.asarray(grid, dtype=float).ravel()
    if g.size == 0:
        raise UsageError(f"{name} is empty")
    d = np.diff(g)
    if not (np.all(d > 0) or np.all(d < 0)):
        raise UsageError(f"{name} must be strictly monotone")
    return g


def sweep_bound(rho: float, period_T_s: float, beta_grid, theta_grid,
                omega: float = OMEGA_EARTH) -> list[SpeedBoundResult]:
    """One result per (beta, theta) pair, beta-major order."""
    _check_rho(rho)
    _check_period(period_T_s, omega)
    betas = _check_grid("beta_grid", beta_grid)
    thetas = _check_grid("theta_grid", theta_grid)
    if np.any((betas < 0) | (betas >= 1)):
        raise DomainError("beta grid values must lie in [0, 1)")
    if np.any((thetas < 0) | (thetas > math.pi)):
        raise DomainError("theta grid values must lie in [0, pi]")
    B, TH = np.meshgrid(betas, thetas, indexing="ij")
    bp = np.abs(B * np.sin(TH) * omega * period_T_s / 2.0)
    bound = _earth_bound(rho, B, bp)
    return [SpeedBoundResult(float(bound[i, j]), rho, float(betas[i]), float(thetas[j]), period_T_s)
            for i in range(betas.size) for j in range(thetas.size)]


SWEEP_COLUMNS = ("beta", "theta_rad", "rho", "T_s", "bound_over_c")


def sweep_rows(results):
    for r in results:
        yield (repr(r.beta), repr(r.theta_rad), repr(r.rho), repr(r.period_T_s), repr(r.bound_over_c))


def write_sweep_csv(fh, results, comment: str | None = None):
    if comment:
        fh.write(f"# {comment}\n")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    w.writerows(sweep_rows(results))
