"""Availability of a simulated tag and minimum storage capacitance search."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .energy_model import BLACKOUT, CAPACITOR, DIRECT_SOLAR, SimTrace

if TYPE_CHECKING:
    from .scenario import Scenario

logger = logging.getLogger(__name__)


class BracketError(ValueError):
    """The capacitance bracket does not straddle the availability target."""

    def __init__(self, message, availability_lo, availability_hi):
        super().__init__(message)
        self.availability_lo = availability_lo
        self.availability_hi = availability_hi


class MonotonicityError(RuntimeError):
    pass


@dataclass
class AvailabilityReport:
    availability_fraction: float
    time_direct_solar_s: float
    time_capacitor_s: float
    time_blackout_s: float
    blackout_intervals: list[tuple[float, float]] = field(default_factory=list)
    warmup_excluded_s: float = 0.0

    @property
    def evaluated_s(self) -> float:
        return self.time_direct_solar_s + self.time_capacitor_s + self.time_blackout_s

    def summary_lines(self) -> list[str]:
        return [
            f"warmup_excluded_s = {self.warmup_excluded_s!r}",
            f"evaluated_s = {self.evaluated_s!r}",
            f"availability = {self.availability_fraction!r}",
            f"time_direct_solar_s = {self.time_direct_solar_s!r}",
            f"time_capacitor_s = {self.time_capacitor_s!r}",
            f"time_blackout_s = {self.time_blackout_s!r}",
            f"blackout_intervals = {len(self.blackout_intervals)}",
        ]


def availability(trace: SimTrace, warmup_s: float = 0.0) -> AvailabilityReport:
    """Fraction of post-warmup time the chip can run.

    Every sample at or after ``warmup_s`` stands for the interval up to the next
    sample, so the final sample is not counted and the phase times add up to
    ``trace end - warmup_s``. Blackout is read from the phase labels, which
    mark exactly the samples below the read/write threshold.
    """
    t_end = float(trace.t[-1])
    if not warmup_s < t_end:
        raise ValueError(f"warmup_s ({warmup_s}) must be shorter than the trace ({t_end} s)")

    sel = np.flatnonzero(trace.t[:-1] >= warmup_s - 1e-9)
    phase = trace.phase[sel]
    dt = trace.dt
    counts = np.bincount(phase, minlength=3)
    n = len(sel)

    dark = phase == BLACKOUT
    intervals = []
    if n and dark.any():
        edges = np.diff(np.concatenate(([0], dark.astype(np.int8), [0])))
        starts = np.flatnonzero(edges == 1)
        stops = np.flatnonzero(edges == -1)
        t_sel = trace.t[sel]
        for a, b in zip(starts, stops):
            end = float(t_sel[b]) if b < n else t_end
            intervals.append((float(t_sel[a]), end))

    return AvailabilityReport(
        availability_fraction=float(n - counts[BLACKOUT]) / n if n else 0.0,
        time_direct_solar_s=float(counts[DIRECT_SOLAR]) * dt,
        time_capacitor_s=float(counts[CAPACITOR]) * dt,
        time_blackout_s=float(counts[BLACKOUT]) * dt,
        blackout_intervals=intervals,
        warmup_excluded_s=float(warmup_s),
    )


def trace_summary_lines(trace: SimTrace, warmup_s: float = 0.0) -> list[str]:
    """Key-value summary computable from the trace alone (so it survives CSV)."""
    report = availability(trace, warmup_s)
    return [
        f"samples = {len(trace)}",
        f"dt_s = {trace.dt!r}",
        f"duration_s = {trace.duration!r}",
        f"v_min_v = {float(trace.v_cap.min())!r}",
        f"v_max_v = {float(trace.v_cap.max())!r}",
        *report.summary_lines(),
        f"entered_blackout_events = {int(np.count_nonzero((trace.phase[1:] == BLACKOUT) & (trace.phase[:-1] != BLACKOUT)))}",
    ]


def write_blackout_csv(report: AvailabilityReport, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["start_s", "end_s"])
        for a, b in report.blackout_intervals:
            w.writerow([repr(a), repr(b)])


def availability_at(scenario: "Scenario", capacitance_f: float) -> float:
    trace = scenario.with_capacitance(capacitance_f).run_simulation()
    return availability(trace, scenario.warmup_s).availability_fraction


def analytic_min_capacitance(i_total: float, t_dark_s: float, dv_budget: float) -> float:
    """Charge-budget capacitance that carries ``i_total`` through one night."""
    return i_total * t_dark_s / dv_budget


def monotonicity_samples(scenario: "Scenario", c_lo: float, c_hi: float, n: int = 8):
    """Availability at ``n`` log-spaced capacitances strictly inside the bracket,
    plus both ends. Returns the samples and the pairs that break monotonicity.
    """
    cs = np.geomspace(c_lo, c_hi, n + 2)
    samples = [(float(c), availability_at(scenario, float(c))) for c in cs]
    violations = [
        (a, b) for a, b in zip(samples, samples[1:]) if b[1] < a[1]
    ]
    return samples, violations


def min_capacitance(
    scenario: "Scenario",
    target_availability: float,
    c_lo: float,
    c_hi: float,
    rel_tol: float = 1e-3,
    check_monotonic: bool = True,
) -> float:
    """Smallest capacitance (F) whose post-warmup availability meets the target.

    Bisects geometrically between ``c_lo`` and ``c_hi`` with a full simulation
    at every probe. Returns ``c_lo`` when it already meets the target.
    """
    if not 0 < c_lo < c_hi:
        raise ValueError(f"need 0 < c_lo < c_hi, got {c_lo}, {c_hi}")
    if not rel_tol > 0:
        raise ValueError(f"rel_tol must be > 0, got {rel_tol}")

    if check_monotonic:
        samples, violations = monotonicity_samples(scenario, c_lo, c_hi)
        a_lo, a_hi = samples[0][1], samples[-1][1]
        if violations:
            msg = "; ".join(
                f"A({a[0]:.4g} F)={a[1]:.6f} > A({b[0]:.4g} F)={b[1]:.6f}" for a, b in violations
            )
            raise MonotonicityError(f"availability is not monotone in capacitance: {msg}")
    else:
        a_lo, a_hi = availability_at(scenario, c_lo), availability_at(scenario, c_hi)

    if a_lo >= target_availability:
        return c_lo
    if a_hi < target_availability:
        raise BracketError(
            f"target {target_availability} not bracketed: A({c_lo})={a_lo}, A({c_hi})={a_hi}",
            a_lo, a_hi,
        )

    lo, hi = c_lo, c_hi
    while (hi - lo) > rel_tol * hi:
        mid = math.sqrt(lo * hi)
        if availability_at(scenario, mid) >= target_availability:
            hi = mid
        else:
            lo = mid
        logger.debug("bracket [%g, %g]", lo, hi)
    return hi
