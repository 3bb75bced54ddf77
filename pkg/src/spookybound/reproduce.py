"""Checks of every reported number the pipeline can reproduce, as a table."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import constants
from .analysis import (
    IntervalPartition,
    analyze_tag_stream,
    find_coincidences,
    synchronize_stream,
)
from .analysis.oracle import brute_force_matches
from .errors import DomainError
from .geo_relativity import (
    FrameVelocity,
    SpacetimeEvent,
    alignment_rho,
    experiment_events,
    invariant_interval,
    lorentz_boost,
    speed_bound_optimal,
    sweep_bound,
    verify_loopholes,
)
from .quantum_model import NoisySingletState, analytic_chsh
from .timetag_sim import TAG_DTYPE, SourceConfig, StationConfig, iter_sync_chunks, iter_tag_chunks


@dataclass(frozen=True)
class CheckRow:
    name: str
    expected: str
    computed: str
    tolerance: str
    passed: bool


def random_velocity(rng, beta_max=0.99) -> FrameVelocity:
    return FrameVelocity(float(rng.uniform(0.0, beta_max)), float(np.arccos(rng.uniform(-1, 1))),
                         float(rng.uniform(0, 2 * math.pi)))


def _optimal_or_error(beta, omega):
    """Bound at the reported inputs, or the error text if they violate a precondition."""
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            r = speed_bound_optimal(constants.RHO, FrameVelocity(beta, math.pi / 2), 1800.0, omega=omega)
    except DomainError as exc:
        return None, f"error: {exc}"
    return r.bound_over_c, f"{r.bound_over_c:.6g}"


def check_headline(omega=constants.OMEGA_EARTH) -> CheckRow:
    val, text = _optimal_or_error(1e-3, omega)
    ok = val is not None and abs(val - 1.38e4) <= 0.01 * 1.38e4
    return CheckRow("headline bound (beta=1e-3)", "1.38e4", text, "1%", ok)


def check_high_beta(omega=constants.OMEGA_EARTH) -> CheckRow:
    val, text = _optimal_or_error(0.9, omega)
    return CheckRow("high-beta bound (beta=0.9)", "~7", text, "[7.0, 7.5]",
                    val is not None and 7.0 <= val <= 7.5)


def check_rho() -> CheckRow:
    a = SpacetimeEvent.on_axis(0.0, 0.0)
    b = SpacetimeEvent.on_axis(constants.BASELINE_FOR_RHO_M, constants.AB_TIMING_UNCERTAINTY_S)
    rho = alignment_rho(a, b)
    return CheckRow("alignment rho (350 ps, 15.35 km)", "6.84e-6", f"{rho:.6g}", "0.5%",
                    abs(rho - 6.84e-6) <= 0.005 * 6.84e-6)


def loophole_boost_invariance(n_boosts, seed):
    events = experiment_events()
    base = verify_loopholes(*events)
    rng = np.random.default_rng(seed)
    same = 0
    for _ in range(n_boosts):
        v = random_velocity(rng)
        boosted = [lorentz_boost(e, v, frame_id="L") for e in events]
        rep = verify_loopholes(*boosted)
        same += [c.passed for c in rep.checks] == [c.passed for c in base.checks]
    return base, same


def check_loopholes(n_boosts=1000, seed=0) -> CheckRow:
    base, same = loophole_boost_invariance(n_boosts, seed)
    return CheckRow("space-time diagram loophole checks", "4/4 pass, frame invariant",
                    f"{sum(c.passed for c in base.checks)}/4 pass, {same}/{n_boosts} boosts agree",
                    "exact", base.passed and same == n_boosts)


def surface_grid(n=50):
    betas = np.linspace(0.0, 0.99, n)
    thetas = np.unique(np.concatenate([np.linspace(0, math.pi / 2, n // 2),
                                       np.linspace(math.pi / 2, math.pi, n - n // 2 + 1)]))
    return betas, thetas


def check_surface(n=50) -> CheckRow:
    betas, thetas = surface_grid(n)
    res = sweep_bound(constants.RHO, 1800.0, betas, thetas)
    grid = np.array([r.bound_over_c for r in res]).reshape(betas.size, thetas.size)
    j = int(np.argmin(np.abs(thetas - math.pi / 2)))
    minimal = bool(np.all(grid >= grid[:, [j]]))
    above = bool(np.all(grid > 1.0))
    return CheckRow(f"bound surface {betas.size}x{thetas.size}", "min at theta=pi/2, > 1",
                    f"min at pi/2: {minimal}; min value {grid.min():.4g}", "exact", minimal and above)


def check_chsh_ideal() -> CheckRow:
    s = analytic_chsh(NoisySingletState(1.0))
    return CheckRow("ideal CHSH", "2*sqrt(2)", f"{s:.15g}", "1e-12", abs(s - 2 * math.sqrt(2)) <= 1e-12)


def check_chsh_visibility() -> CheckRow:
    s = analytic_chsh(NoisySingletState(constants.VISIBILITY))
    return CheckRow("CHSH at V=0.913", "2.582", f"{s:.6f}", "1e-3", abs(s - 2.582) <= 1e-3)


def check_relativity(n=1000, seed=1) -> CheckRow:
    rng = np.random.default_rng(seed)
    worst_inv = worst_rt = 0.0
    for _ in range(n):
        e1 = SpacetimeEvent(tuple(rng.normal(0, 1e4, 3)), float(rng.normal(0, 3e-5)))
        e2 = SpacetimeEvent(tuple(rng.normal(0, 1e4, 3)), float(rng.normal(0, 3e-5)))
        v = random_velocity(rng)
        b1, b2 = lorentz_boost(e1, v, "L"), lorentz_boost(e2, v, "L")
        scale = float(np.sum((e2.r - e1.r) ** 2) + (constants.C * (e2.time_s - e1.time_s)) ** 2)
        worst_inv = max(worst_inv, abs(invariant_interval(b1, b2) - invariant_interval(e1, e2)) / scale)
        back = lorentz_boost(b1, v.reversed(), "earth")
        mag = math.sqrt(float(e1.r @ e1.r) + (constants.C * e1.time_s) ** 2)
        err = math.sqrt(float(np.sum((back.r - e1.r) ** 2)) + (constants.C * (back.time_s - e1.time_s)) ** 2)
        worst_rt = max(worst_rt, err / mag)
    return CheckRow(f"interval invariance / boost round trip ({n} cases)", "identities",
                    f"{worst_inv:.2e} / {worst_rt:.2e}", "1e-9", worst_inv <= 1e-9 and worst_rt <= 1e-9)


def check_matcher(n_instances=20, max_tags=2000, seed=2) -> CheckRow:
    rng = np.random.default_rng(seed)
    agree = 0
    for _ in range(n_instances):
        na, nb = (int(x) for x in rng.integers(1, max_tags + 1, 2))
        span = int(rng.integers(max(na, nb), 20 * max(na, nb))) * 1000
        ta = np.sort(rng.integers(0, span, na))
        tb = np.sort(rng.integers(0, span, nb))
        A = np.zeros(na, TAG_DTYPE)
        A["timestamp_ps"] = ta
        B = np.zeros(nb, TAG_DTYPE)
        B["timestamp_ps"] = tb
        fast = find_coincidences(A, B, None, 3000)
        ref = brute_force_matches(ta, tb, 3000)
        agree += sorted(zip(fast["index_a"].tolist(), fast["index_b"].tolist())) == sorted(ref)
    return CheckRow("fast matcher vs brute force", "identical pair sets",
                    f"{agree}/{n_instances}", "exact", agree == n_instances)


@dataclass(frozen=True)
class ClosedLoopSummary:
    clock_offset_err_ps: float
    clock_drift_err: float
    tdc_ps: int
    s_values: tuple
    sigmas: tuple
    mean_s: float
    sigma_mean: float

    @property
    def n_violating_1sigma(self):
        return sum((s - 2.0) / g >= 1.0 for s, g in zip(self.s_values, self.sigmas))


def closed_loop_run(duration_s=constants.RUN_DURATION_S, T_s=constants.INTERVAL_T_S, seed=2012,
                    visibility=constants.VISIBILITY):
    src = SourceConfig(pair_rate_hz=5000.0, visibility=visibility, duration_s=duration_s)
    a = StationConfig()
    b = StationConfig(clock_offset_s=1e-6, clock_drift_s_per_s=1e-9)
    clock = synchronize_stream(iter_sync_chunks(src, a, b, seed))
    tags = ((c.tags_a, c.tags_b) for c in iter_tag_chunks(src, a, b, seed, with_truth=False))
    res = analyze_tag_stream(tags, clock, IntervalPartition(T_s))
    s = tuple(iv.s_value for iv in res.intervals)
    g = tuple(iv.sigma_s for iv in res.intervals)
    return ClosedLoopSummary(abs(clock.offset_s - 1e-6) * 1e12, abs(clock.drift_s_per_s - 1e-9),
                             b.tdc_resolution_ps, s, g, float(np.mean(s)),
                             math.sqrt(sum(x * x for x in g)) / len(g)), res


def check_closed_loop(duration_s=3600.0, T_s=300.0, seed=2012) -> CheckRow:
    summ, res = closed_loop_run(duration_s, T_s, seed)
    n = len(summ.s_values)
    expected_n = int(round(duration_s / T_s))
    target = constants.VISIBILITY * constants.TSIRELSON
    ok = (n == expected_n and summ.clock_offset_err_ps <= summ.tdc_ps and summ.clock_drift_err <= 1e-11
          and all(x > 2 for x in summ.s_values) and summ.n_violating_1sigma == n
          and abs(summ.mean_s - target) <= 3 * summ.sigma_mean)
    return CheckRow(f"closed-loop run {duration_s:g} s, T={T_s:g} s",
                    f"{expected_n}/{expected_n} violate, mean S={target:.4f}",
                    f"{summ.n_violating_1sigma}/{n} violate, mean S={summ.mean_s:.4f}"
                    f"+-{summ.sigma_mean:.4f}",
                    "1 TDC step, 1e-11 drift, 3 sigma", ok)


def all_checks(omega=constants.OMEGA_EARTH, full=False):
    rows = [check_headline(omega), check_high_beta(omega), check_rho(), check_loopholes(),
            check_surface(), check_chsh_ideal(), check_chsh_visibility(), check_relativity(),
            check_matcher()]
    if full:
        rows.append(check_closed_loop(constants.RUN_DURATION_S, constants.INTERVAL_T_S))
    else:
        rows.append(check_closed_loop())
    return rows


def format_table(rows) -> str:
    head = ("check", "expected", "computed", "tolerance", "result")
    body = [(r.name, r.expected, r.computed, r.tolerance, "PASS" if r.passed else "FAIL") for r in rows]
    widths = [max(len(x[i]) for x in [head] + body) for i in range(5)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(line, widths)).rstrip() for line in [head] + body]
    return "\n".join(lines) + "\n"
