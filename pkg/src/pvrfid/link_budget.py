"""Forward-link power and read-range calculations for UHF backscatter tags.

All internal arithmetic is done in watts; dBm only appears at the API edges.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0  # m/s


def dbm_to_watts(p_dbm: float) -> float:
    """Convert absolute power in dBm to watts."""
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def watts_to_dbm(p_w: float) -> float:
    """Convert absolute power in watts to dBm.

    Raises ValueError for non-positive power, which has no logarithm.
    """
    if not p_w > 0:
        raise ValueError(f"power must be positive to express in dBm, got {p_w!r} W")
    return 10.0 * math.log10(p_w) + 30.0


def wavelength(frequency_hz: float) -> float:
    return SPEED_OF_LIGHT / frequency_hz


@dataclass(frozen=True)
class LinkParams:
    """Reader-to-tag forward link.

    ``g_product`` is the combined linear gain G_tag * G_reader. When
    ``eirp_mode`` is set, ``p_tx_dbm`` is read as EIRP (reader antenna gain
    already folded in) and ``g_product`` should only carry the tag gain and
    any residual losses. The arithmetic is identical in both modes.
    """

    p_tx_dbm: float = 30.0
    g_product: float = 0.8
    tau: float = 0.8
    frequency_hz: float = 915e6
    eirp_mode: bool = False

    def __post_init__(self):
        if not math.isfinite(self.p_tx_dbm):
            raise ValueError(f"p_tx_dbm must be finite, got {self.p_tx_dbm!r}")
        if not self.g_product > 0:
            raise ValueError(f"g_product must be > 0, got {self.g_product!r}")
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError(f"tau must lie in [0, 1], got {self.tau!r}")
        if not self.frequency_hz > 0:
            raise ValueError(f"frequency_hz must be > 0, got {self.frequency_hz!r}")

    @property
    def p_tx_w(self) -> float:
        return dbm_to_watts(self.p_tx_dbm)

    @property
    def wavelength_m(self) -> float:
        return wavelength(self.frequency_hz)


@dataclass(frozen=True)
class IcProfile:
    """Dual-mode RFID chip: RF sensitivities plus supply thresholds and draw."""

    sensitivity_passive_dbm: float = -21.0
    sensitivity_semipassive_dbm: float = -31.0
    v_readwrite: float = 1.5
    v_eeprom: float = 3.0
    i_operating: float = 10e-6
    duty_cycle: float = 1.0

    def __post_init__(self):
        if self.sensitivity_semipassive_dbm > self.sensitivity_passive_dbm:
            raise ValueError(
                "sensitivity_semipassive_dbm must be <= sensitivity_passive_dbm "
                f"({self.sensitivity_semipassive_dbm} > {self.sensitivity_passive_dbm})"
            )
        if not 0 < self.v_readwrite <= self.v_eeprom:
            raise ValueError(
                f"need 0 < v_readwrite <= v_eeprom, got {self.v_readwrite}, {self.v_eeprom}"
            )
        if self.i_operating < 0:
            raise ValueError(f"i_operating must be >= 0, got {self.i_operating!r}")
        if not 0.0 <= self.duty_cycle <= 1.0:
            raise ValueError(f"duty_cycle must lie in [0, 1], got {self.duty_cycle!r}")

    @property
    def load_current(self) -> float:
        """Average draw while the chip is above its read/write threshold."""
        return self.duty_cycle * self.i_operating


@dataclass(frozen=True)
class MatchingProfile:
    """Sampled transmission coefficient tau(f), interpolated linearly."""

    frequencies_hz: tuple[float, ...]
    taus: tuple[float, ...] = field(default=())

    def __post_init__(self):
        f = tuple(float(x) for x in self.frequencies_hz)
        t = tuple(float(x) for x in self.taus)
        object.__setattr__(self, "frequencies_hz", f)
        object.__setattr__(self, "taus", t)
        if not f:
            raise ValueError("matching profile needs at least one (frequency, tau) point")
        if len(f) != len(t):
            raise ValueError("frequency and tau columns differ in length")
        if any(b <= a for a, b in zip(f, f[1:])):
            raise ValueError("matching profile frequencies must be strictly increasing")
        if any(not 0.0 <= x <= 1.0 for x in t):
            raise ValueError("matching profile tau values must lie in [0, 1]")

    @classmethod
    def from_points(cls, points: Iterable[tuple[float, float]]) -> "MatchingProfile":
        pts = list(points)
        return cls(tuple(p[0] for p in pts), tuple(p[1] for p in pts))

    @classmethod
    def constant(cls, tau: float, frequency_hz: float = 915e6) -> "MatchingProfile":
        return cls((frequency_hz,), (tau,))

    def tau_at(self, frequency_hz):
        # np.interp holds the endpoint values outside the table
        return np.interp(frequency_hz, self.frequencies_hz, self.taus)

    @classmethod
    def from_csv(cls, path) -> "MatchingProfile":
        """Read a ``frequency_hz,tau`` CSV."""
        path = Path(path)
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None:
                raise ValueError(f"{path}: empty matching profile file")
            if [h.strip() for h in header] != ["frequency_hz", "tau"]:
                raise ValueError(f"{path}:1: expected header 'frequency_hz,tau', got {header!r}")
            points = []
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                try:
                    f, t = (float(x) for x in row)
                except ValueError as exc:
                    raise ValueError(f"{path}:{lineno}: malformed row {row!r}") from exc
                points.append((f, t))
        return cls.from_points(points)


def _received_power_w(link: LinkParams, distance_m: float, tau: float | None = None) -> float:
    tau = link.tau if tau is None else tau
    fspl = (link.wavelength_m / (4.0 * math.pi * distance_m)) ** 2
    return link.p_tx_w * link.g_product * tau * fspl


def received_power(link: LinkParams, distance_m: float) -> float:
    """Power delivered to the chip at ``distance_m``, in dBm."""
    if not distance_m > 0:
        raise ValueError(f"distance must be > 0, got {distance_m!r}")
    return watts_to_dbm(_received_power_w(link, distance_m))


def read_range(link: LinkParams, sensitivity_dbm: float, tau: float | None = None) -> float:
    """Largest distance (m) at which the forward link still powers the chip.

    ``tau`` overrides ``link.tau`` (used by frequency sweeps).
    """
    tau = link.tau if tau is None else tau
    p_ic = dbm_to_watts(sensitivity_dbm)
    return link.wavelength_m / (4.0 * math.pi) * math.sqrt(link.p_tx_w * link.g_product * tau / p_ic)


def range_ratio(ic: IcProfile) -> float:
    """Semi-passive over passive read range; depends on the sensitivities only."""
    return 10.0 ** ((ic.sensitivity_passive_dbm - ic.sensitivity_semipassive_dbm) / 20.0)


@dataclass(frozen=True)
class RangePoint:
    frequency_hz: float
    d_passive_m: float
    d_semipassive_m: float


def range_sweep(
    link_base: LinkParams,
    ic: IcProfile,
    matching: MatchingProfile,
    f_lo: float,
    f_hi: float,
    n_points: int,
) -> list[RangePoint]:
    """Read range of both modes across ``n_points`` evenly spaced frequencies."""
    if not f_lo < f_hi:
        raise ValueError(f"need f_lo < f_hi, got {f_lo}, {f_hi}")
    if n_points < 2:
        raise ValueError(f"need n_points >= 2, got {n_points}")
    if matching is None or not matching.frequencies_hz:
        raise ValueError("matching profile is empty")

    out = []
    for f in np.linspace(f_lo, f_hi, n_points):
        f = float(f)
        tau = float(matching.tau_at(f))
        link = LinkParams(link_base.p_tx_dbm, link_base.g_product, tau, f, link_base.eirp_mode)
        out.append(RangePoint(
            f,
            read_range(link, ic.sensitivity_passive_dbm),
            read_range(link, ic.sensitivity_semipassive_dbm),
        ))
    return out


def write_sweep_csv(points: Sequence[RangePoint], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["frequency_hz", "d_passive_m", "d_semipassive_m"])
        for p in points:
            w.writerow([repr(p.frequency_hz), repr(p.d_passive_m), repr(p.d_semipassive_m)])
