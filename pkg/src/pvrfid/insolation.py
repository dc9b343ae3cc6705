"""Irradiance-vs-time profiles: synthetic generators and sampled data."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class ProfileFormatError(ValueError):
    """Raised for unreadable or invariant-violating irradiance files."""


@dataclass(frozen=True)
class Constant:
    g_wm2: float

    def __post_init__(self):
        if not self.g_wm2 >= 0:
            raise ValueError(f"irradiance must be >= 0, got {self.g_wm2!r}")

    period_s = None

    def evaluate(self, t):
        return np.full(np.shape(t), float(self.g_wm2))


@dataclass(frozen=True)
class Square:
    """``g_day_wm2`` for ``day_length_s`` of every ``period_s``, dark otherwise."""

    g_day_wm2: float
    day_start_s: float = 0.0
    day_length_s: float = 43_200.0
    period_s: float = 86_400.0

    def __post_init__(self):
        if not self.g_day_wm2 >= 0:
            raise ValueError(f"irradiance must be >= 0, got {self.g_day_wm2!r}")
        if not self.period_s > 0:
            raise ValueError(f"period_s must be > 0, got {self.period_s!r}")
        if not 0 <= self.day_length_s <= self.period_s:
            raise ValueError("day_length_s must lie in [0, period_s]")

    def evaluate(self, t):
        phase = np.mod(np.asarray(t, dtype=float) - self.day_start_s, self.period_s)
        return np.where(phase < self.day_length_s, float(self.g_day_wm2), 0.0)


@dataclass(frozen=True)
class SinusoidalDiurnal:
    """Half-wave rectified sine: positive lobe is day, the other half is clipped."""

    g_peak_wm2: float
    period_s: float = 86_400.0

    def __post_init__(self):
        if not self.g_peak_wm2 >= 0:
            raise ValueError(f"irradiance must be >= 0, got {self.g_peak_wm2!r}")
        if not self.period_s > 0:
            raise ValueError(f"period_s must be > 0, got {self.period_s!r}")

    def evaluate(self, t):
        # reduce first so t and t + period give bit-identical results
        phase = np.mod(np.asarray(t, dtype=float), self.period_s) / self.period_s
        return np.maximum(self.g_peak_wm2 * np.sin(2.0 * math.pi * phase), 0.0)


@dataclass(frozen=True)
class Sampled:
    """Piecewise-linear samples; held at the end values outside their span."""

    t_s: tuple[float, ...]
    g_wm2: tuple[float, ...]

    period_s = None

    def __post_init__(self):
        t = tuple(float(x) for x in self.t_s)
        g = tuple(float(x) for x in self.g_wm2)
        object.__setattr__(self, "t_s", t)
        object.__setattr__(self, "g_wm2", g)
        if len(t) != len(g) or not t:
            raise ValueError("sampled profile needs equal, non-empty time and irradiance columns")
        if any(b <= a for a, b in zip(t, t[1:])):
            raise ValueError("sampled profile times must be strictly increasing")
        if any(not x >= 0 for x in g):
            raise ValueError("sampled profile irradiance must be >= 0")

    def evaluate(self, t):
        return np.interp(np.asarray(t, dtype=float), self.t_s, self.g_wm2)


IrradianceProfile = Constant | Square | SinusoidalDiurnal | Sampled


def irradiance_at(profile: IrradianceProfile, t_s: float) -> float:
    """Irradiance in W/m^2 at time ``t_s`` (seconds, >= 0)."""
    if t_s < 0:
        raise ValueError(f"t_s must be >= 0, got {t_s!r}")
    return float(profile.evaluate(t_s))


def irradiance_series(profile: IrradianceProfile, t) -> np.ndarray:
    """Vectorised :func:`irradiance_at` over an array of times."""
    return np.asarray(profile.evaluate(np.asarray(t, dtype=float)), dtype=float)


def from_csv(path) -> Sampled:
    """Load a ``t_s,g_wm2`` file as a :class:`Sampled` profile."""
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ProfileFormatError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if header != ["t_s", "g_wm2"]:
        raise ProfileFormatError(f"{path}:1: expected header 't_s,g_wm2', got {rows[0]!r}")

    ts, gs = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise ProfileFormatError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
        try:
            t, g = float(row[0]), float(row[1])
        except ValueError:
            raise ProfileFormatError(f"{path}:{lineno}: non-numeric value in {row!r}") from None
        if not (math.isfinite(t) and math.isfinite(g)):
            raise ProfileFormatError(f"{path}:{lineno}: non-finite value in {row!r}")
        if g < 0:
            raise ProfileFormatError(f"{path}:{lineno}: negative irradiance {g}")
        if ts and t <= ts[-1]:
            raise ProfileFormatError(
                f"{path}:{lineno}: timestamps must be strictly increasing ({t} after {ts[-1]})"
            )
        ts.append(t)
        gs.append(g)

    if len(ts) < 2:
        raise ProfileFormatError(f"{path}: need at least 2 data rows, got {len(ts)}")
    return Sampled(tuple(ts), tuple(gs))
