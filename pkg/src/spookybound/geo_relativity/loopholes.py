"""Space-like separation checks for the locality and freedom-of-choice loopholes."""

from __future__ import annotations

import csv
from dataclasses import dataclass

from .spacetime import IntervalClass, SpacetimeEvent, classify_interval, _require_same_frame


@dataclass(frozen=True)
class LoopholeCheck:
    name: str
    description: str
    passed: bool
    intervals: tuple  # ((pair label, IntervalClass), ...)


@dataclass(frozen=True)
class LoopholeReport:
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name) -> LoopholeCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failed(self):
        return [c.name for c in self.checks if not c.passed]


CHECK_NAMES = ("measurements_spacelike", "A_outside_cone_of_b", "B_outside_cone_of_a",
               "settings_outside_cone_of_source")


def verify_loopholes(E: SpacetimeEvent, a: SpacetimeEvent, b: SpacetimeEvent,
                     A: SpacetimeEvent, B: SpacetimeEvent, tol_m2: float | None = None) -> LoopholeReport:
    """Check the space-time ordering of a Bell test.

    E is the pair emission, a/b the setting choices and A/B the measurements
    at the two stations.
    """
    _require_same_frame(E, a, b, A, B)

    def cls(x, y) -> IntervalClass:
        return classify_interval(x, y, tol_m2)

    ab = cls(A, B)
    Ab = cls(A, b)
    Ba = cls(B, a)
    aE = cls(a, E)
    bE = cls(b, E)
    checks = (
        LoopholeCheck("measurements_spacelike", "A and B mutually space-like",
                      ab.spacelike, (("A-B", ab),)),
        LoopholeCheck("A_outside_cone_of_b", "measurement A space-like from setting choice b",
                      Ab.spacelike, (("A-b", Ab),)),
        LoopholeCheck("B_outside_cone_of_a", "measurement B space-like from setting choice a",
                      Ba.spacelike, (("B-a", Ba),)),
        LoopholeCheck("settings_outside_cone_of_source",
                      "setting choices a and b each space-like from emission E",
                      aE.spacelike and bE.spacelike, (("a-E", aE), ("b-E", bE))),
    )
    return LoopholeReport(checks)


REPORT_COLUMNS = ("check", "pair", "interval_class", "invariant_interval_m2", "passed")


def write_report_csv(fh, report: LoopholeReport, comment: str | None = None):
    """One row per check; a check spanning two pairs lists both, ';'-joined."""
    if comment:
        fh.write(f"# {comment}\n")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for c in report.checks:
        w.writerow((c.name,
                    ";".join(p for p, _ in c.intervals),
                    ";".join(iv.kind.value for _, iv in c.intervals),
                    ";".join(repr(iv.invariant_interval_m2) for _, iv in c.intervals),
                    "PASS" if c.passed else "FAIL"))
    w.writerow(("overall", "", "", "", "PASS" if report.passed else "FAIL"))


def experiment_events(half_baseline_m=7.8e3, setting_time_s=23.1e-6, measurement_time_s=26.1e-6):
    """The five events of the reported space-time diagram (E, a, b, A, B)."""
    on = SpacetimeEvent.on_axis
    return (on(0.0, 0.0),
            on(-half_baseline_m, setting_time_s), on(half_baseline_m, setting_time_s),
            on(-half_baseline_m, measurement_time_s), on(half_baseline_m, measurement_time_s))
