"""Reader access-mode measurement campaigns against a simulated tag.

Inventory rounds and LLRP mechanics are collapsed into one Bernoulli trial
per read attempt; contention and channel losses live in ``success_prob``.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .energy_model import BLACKOUT, EnergyState, Phase, SimTrace, _PHASES
from .link_budget import IcProfile, LinkParams, received_power


class ReadResult(enum.Enum):
    SUCCESS = "success"
    NO_ENERGY = "no_energy"
    OUT_OF_RANGE = "out_of_range"
    LOST = "lost"  # energized and in range, but the attempt failed


@dataclass(frozen=True)
class ReaderConfig:
    attempt_rate_hz: float = 4.0
    success_prob: float = 0.3875
    distance_m: float = 2.0
    population: int = 0
    rng_seed: int = 0

    def __post_init__(self):
        if not self.attempt_rate_hz > 0:
            raise ValueError(f"attempt_rate_hz must be > 0, got {self.attempt_rate_hz!r}")
        if not 0.0 <= self.success_prob <= 1.0:
            raise ValueError(f"success_prob must lie in [0, 1], got {self.success_prob!r}")
        if not self.distance_m > 0:
            raise ValueError(f"distance_m must be > 0, got {self.distance_m!r}")
        if self.population < 0:
            raise ValueError(f"population must be >= 0, got {self.population!r}")


def in_read_range(link: LinkParams | None, ic: IcProfile | None, distance_m: float, energized: bool = True) -> bool:
    """Forward-link check at ``distance_m`` for the chip's current mode.

    An energized chip runs semi-passive; otherwise it needs the passive
    sensitivity. With no link or chip given the link is assumed good.
    """
    if link is None or ic is None:
        return True
    sens = ic.sensitivity_semipassive_dbm if energized else ic.sensitivity_passive_dbm
    return received_power(link, distance_m) >= sens


def attempt_read(state: EnergyState, link_ok: bool, cfg: ReaderConfig, rng: np.random.Generator) -> ReadResult:
    # always consume one draw so streams stay aligned with run_campaign
    u = rng.random()
    if state.phase is Phase.BLACKOUT:
        return ReadResult.NO_ENERGY
    if not link_ok:
        return ReadResult.OUT_OF_RANGE
    return ReadResult.SUCCESS if u < cfg.success_prob else ReadResult.LOST


@dataclass
class CampaignResult:
    duration_s: float
    attempts: int
    total_successes: int
    hourly: np.ndarray  # successes per hour bin
    longest_gap_s: float
    per_phase: dict[str, int] = field(default_factory=dict)
    energized_in_range_s: float = 0.0
    expected_successes: float = 0.0
    success_times: np.ndarray | None = None

    def summary_lines(self) -> list[str]:
        lines = [
            f"duration_s = {self.duration_s!r}",
            f"attempts = {self.attempts}",
            f"total_successes = {self.total_successes}",
            f"expected_successes = {self.expected_successes:.1f}",
            f"longest_gap_s = {self.longest_gap_s!r}",
        ]
        lines += [f"successes_{name} = {n}" for name, n in self.per_phase.items()]
        return lines


def run_campaign(
    trace: SimTrace,
    cfg: ReaderConfig,
    link: LinkParams | None = None,
    duration_s: float | None = None,
) -> CampaignResult:
    """Fire read attempts at ``cfg.attempt_rate_hz`` against the energy trace.

    Attempt k happens at ``k / attempt_rate_hz`` and sees the nearest trace
    sample. The campaign spans the whole trace unless ``duration_s`` is given.
    The outcome is a pure function of the inputs and ``cfg.rng_seed``.
    """
    if duration_s is None:
        duration_s = trace.duration
    if duration_s > trace.duration + 1e-9:
        raise ValueError(f"trace covers {trace.duration} s, campaign needs {duration_s} s")

    n = int(math.floor(duration_s * cfg.attempt_rate_hz + 1e-9))
    t_att = np.arange(n, dtype=float) / cfg.attempt_rate_hz
    idx = trace.index_at(t_att)
    phase = trace.phase[idx]
    energized = phase != BLACKOUT

    ic = trace.path.ic if trace.path is not None else None
    in_range = in_read_range(link, ic, cfg.distance_m, energized=True)
    rng = np.random.default_rng(cfg.rng_seed)
    u = rng.random(n)
    ok = energized & in_range & (u < cfg.success_prob)

    t_ok = t_att[ok]
    n_hours = max(1, int(math.ceil(duration_s / 3600.0 - 1e-9)))
    hourly = np.bincount((t_ok // 3600.0).astype(np.int64), minlength=n_hours)[:n_hours]

    bounds = np.concatenate(([0.0], t_ok, [float(duration_s)]))
    longest_gap = float(np.max(np.diff(bounds)))

    per_phase = {p.value: int(np.count_nonzero(phase[ok] == code)) for code, p in enumerate(_PHASES)}
    live = float(np.count_nonzero(energized)) / cfg.attempt_rate_hz if in_range else 0.0
    return CampaignResult(
        duration_s=float(duration_s),
        attempts=n,
        total_successes=int(np.count_nonzero(ok)),
        hourly=hourly,
        longest_gap_s=longest_gap,
        per_phase=per_phase,
        energized_in_range_s=live,
        expected_successes=live * cfg.attempt_rate_hz * cfg.success_prob,
        success_times=t_ok,
    )


def write_hourly_csv(result: CampaignResult, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["hour", "successes"])
        for hour, count in enumerate(result.hourly.tolist()):
            w.writerow([hour, count])
