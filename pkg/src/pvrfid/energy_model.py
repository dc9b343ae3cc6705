"""Time-stepped model of the tag power path.

Solar cell -> series blocking diode -> Zener-clamped storage capacitor -> IC.
The cell is a current source proportional to irradiance that cuts off at its
open-circuit voltage; the Zener is an ideal clamp; the IC draws
``duty_cycle * i_operating`` only while the capacitor sits at or above the
read/write threshold. Integration is explicit Euler, which is exact between
switching instants because every current is piecewise constant.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from numba import njit

from .insolation import IrradianceProfile, irradiance_series
from .link_budget import IcProfile


class Phase(enum.Enum):
    DIRECT_SOLAR = "direct_solar"
    CAPACITOR = "capacitor"
    BLACKOUT = "blackout"


# integer codes used inside trace arrays
_PHASES = (Phase.DIRECT_SOLAR, Phase.CAPACITOR, Phase.BLACKOUT)
_CODE = {p: i for i, p in enumerate(_PHASES)}
DIRECT_SOLAR, CAPACITOR, BLACKOUT = 0, 1, 2


@dataclass(frozen=True)
class PvCell:
    area_cm2: float = 12.0
    j_sc_stc: float = 8e-3  # A/cm^2 at 1000 W/m^2
    v_max: float = 4.0

    def __post_init__(self):
        for name in ("area_cm2", "j_sc_stc", "v_max"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)!r}")

    @property
    def i_sc_stc(self) -> float:
        """Short-circuit current at 1000 W/m^2, amperes."""
        return self.j_sc_stc * self.area_cm2


@dataclass(frozen=True)
class PowerPath:
    pv: PvCell = field(default_factory=PvCell)
    v_diode: float = 0.0
    v_clamp: float = 2.7
    capacitance_f: float = 1.0
    i_leak: float = 1e-6
    ic: IcProfile = field(default_factory=IcProfile)

    def __post_init__(self):
        if not self.v_clamp > self.ic.v_readwrite:
            raise ValueError(
                f"v_clamp must exceed ic.v_readwrite ({self.v_clamp} <= {self.ic.v_readwrite})"
            )
        if not self.capacitance_f > 0:
            raise ValueError(f"capacitance_f must be > 0, got {self.capacitance_f!r}")
        if self.i_leak < 0:
            raise ValueError(f"i_leak must be >= 0, got {self.i_leak!r}")
        if self.v_diode < 0:
            raise ValueError(f"v_diode must be >= 0, got {self.v_diode!r}")

    def with_capacitance(self, capacitance_f: float) -> "PowerPath":
        return replace(self, capacitance_f=capacitance_f)

    @property
    def eeprom_reachable(self) -> bool:
        """Whether the clamp lets the capacitor reach the EEPROM-write threshold."""
        return self.v_clamp >= self.ic.v_eeprom

    def _kernel_args(self):
        return (
            self.pv.i_sc_stc / 1000.0,
            self.pv.v_max,
            self.v_diode,
            self.v_clamp,
            self.capacitance_f,
            self.i_leak,
            self.ic.load_current,
            self.ic.v_readwrite,
        )


@dataclass(frozen=True)
class EnergyState:
    t: float
    v_cap: float
    phase: Phase
    i_pv_delivered: float = 0.0
    i_load_drawn: float = 0.0


@njit(cache=True)
def _pv_on(v_cap, g, v_max, v_diode):
    return g > 0.0 and v_cap + v_diode < v_max


@njit(cache=True)
def _classify(v_cap, g, v_max, v_diode, v_rw):
    if v_cap < v_rw:
        return BLACKOUT
    if _pv_on(v_cap, g, v_max, v_diode):
        return DIRECT_SOLAR
    return CAPACITOR


@njit(cache=True)
def _advance(v, g, dt, isc_per_wm2, v_max, v_diode, v_clamp, cap, i_leak, i_ic, v_rw):
    i_pv = isc_per_wm2 * g if _pv_on(v, g, v_max, v_diode) else 0.0
    i_out = i_leak + (i_ic if v >= v_rw else 0.0)
    v_new = v + (i_pv - i_out) * dt / cap
    # Diagnostics are reported net of the clamps so that C*dV == (i_pv - i_load)*dt
    # holds for every step: the Zener shunts the surplus, and an empty capacitor
    # cannot source more than it holds.
    if v_new > v_clamp:
        v_new = v_clamp
        i_pv = i_out + cap * (v_clamp - v) / dt
    elif v_new < 0.0:
        v_new = 0.0
        i_out = i_pv + cap * v / dt
    return v_new, i_pv, i_out


@njit(cache=True)
def _run(v0, g, dt, isc_per_wm2, v_max, v_diode, v_clamp, cap, i_leak, i_ic, v_rw):
    n = g.shape[0]
    v = np.empty(n)
    i_pv = np.zeros(n)
    i_load = np.zeros(n)
    phase = np.empty(n, dtype=np.int8)
    v[0] = v0
    phase[0] = _classify(v0, g[0], v_max, v_diode, v_rw)
    for k in range(n - 1):
        v[k + 1], i_pv[k + 1], i_load[k + 1] = _advance(
            v[k], g[k], dt, isc_per_wm2, v_max, v_diode, v_clamp, cap, i_leak, i_ic, v_rw
        )
        phase[k + 1] = _classify(v[k + 1], g[k + 1], v_max, v_diode, v_rw)
    return v, i_pv, i_load, phase


def pv_current(pv: PvCell, irradiance_wm2: float, v_terminal: float) -> float:
    """Cell output current at the given terminal voltage, amperes."""
    if irradiance_wm2 < 0:
        raise ValueError(f"irradiance must be >= 0, got {irradiance_wm2!r}")
    if v_terminal >= pv.v_max:
        return 0.0
    return pv.i_sc_stc * irradiance_wm2 / 1000.0


def classify_phase(path: PowerPath, state: EnergyState, irradiance_wm2: float) -> Phase:
    code = _classify(state.v_cap, irradiance_wm2, path.pv.v_max, path.v_diode, path.ic.v_readwrite)
    return _PHASES[code]


def step(path: PowerPath, state: EnergyState, irradiance_wm2: float, dt_s: float) -> EnergyState:
    """Advance ``state`` by one explicit Euler step of ``dt_s`` seconds.

    ``irradiance_wm2`` is held over the step and also used to label the phase
    of the returned state.
    """
    if not dt_s > 0:
        raise ValueError(f"dt_s must be > 0, got {dt_s!r}")
    if irradiance_wm2 < 0:
        raise ValueError(f"irradiance must be >= 0, got {irradiance_wm2!r}")
    v, i_pv, i_load = _advance(state.v_cap, float(irradiance_wm2), float(dt_s), *path._kernel_args())
    new = EnergyState(state.t + dt_s, v, Phase.BLACKOUT, i_pv, i_load)
    return replace(new, phase=classify_phase(path, new, irradiance_wm2))


def time_to_blackout(capacitance_f: float, v_from: float, v_to: float, i_total: float) -> float:
    """Constant-current discharge time from ``v_from`` down to ``v_to``.

    Returns ``math.inf`` when nothing draws current.
    """
    if not v_from > v_to:
        raise ValueError(f"need v_from > v_to, got {v_from}, {v_to}")
    if i_total < 0:
        raise ValueError(f"i_total must be >= 0, got {i_total!r}")
    if i_total == 0:
        return math.inf
    return capacitance_f * (v_from - v_to) / i_total


@dataclass(frozen=True)
class Event:
    t_s: float
    name: str


CHARGE_COMPLETE = "charge_complete"
ENTERED_BLACKOUT = "entered_blackout"
EXITED_BLACKOUT = "exited_blackout"


@dataclass
class SimTrace:
    """Uniformly sampled simulation output, stored column-wise."""

    t: np.ndarray
    v_cap: np.ndarray
    phase: np.ndarray  # int8 codes, see Phase
    i_pv: np.ndarray
    i_load: np.ndarray
    dt: float
    events: list[Event] = field(default_factory=list)
    path: PowerPath | None = None
    irradiance: np.ndarray | None = None

    def __len__(self):
        return len(self.t)

    def __getitem__(self, k) -> EnergyState:
        return EnergyState(
            float(self.t[k]), float(self.v_cap[k]), _PHASES[int(self.phase[k])],
            float(self.i_pv[k]), float(self.i_load[k]),
        )

    def __iter__(self):
        return (self[k] for k in range(len(self)))

    @property
    def duration(self) -> float:
        return float(self.t[-1] - self.t[0])

    def phase_labels(self) -> list[str]:
        return [_PHASES[c].value for c in self.phase]

    def index_at(self, t_s):
        """Nearest sample index for time(s) ``t_s``."""
        idx = np.rint((np.asarray(t_s, dtype=float) - self.t[0]) / self.dt).astype(np.int64)
        return np.clip(idx, 0, len(self.t) - 1)

    def events_named(self, name: str) -> list[float]:
        return [e.t_s for e in self.events if e.name == name]


def _find_events(t, v, phase, v_clamp) -> list[Event]:
    out = []
    full = v >= v_clamp
    dark = phase == BLACKOUT
    for name, mask in (
        (CHARGE_COMPLETE, full[1:] & ~full[:-1]),
        (ENTERED_BLACKOUT, dark[1:] & ~dark[:-1]),
        (EXITED_BLACKOUT, ~dark[1:] & dark[:-1]),
    ):
        out.extend(Event(float(t[k + 1]), name) for k in np.flatnonzero(mask))
    order = {CHARGE_COMPLETE: 0, ENTERED_BLACKOUT: 1, EXITED_BLACKOUT: 2}
    out.sort(key=lambda e: (e.t_s, order[e.name]))
    return out


def n_steps(duration_s: float, dt_s: float) -> int:
    # tolerate float noise such as 259200 / 0.1
    return int(math.floor(duration_s / dt_s + 1e-9))


def simulate(
    path: PowerPath,
    profile: IrradianceProfile,
    duration_s: float,
    dt_s: float,
    v_initial: float = 0.0,
) -> SimTrace:
    """Run the power path over ``duration_s`` and return the sampled trace.

    Each step holds the irradiance at its start; each sample's phase uses the
    irradiance at its own timestamp. Events are stamped at the first sample
    after a threshold crossing.
    """
    if not duration_s > 0:
        raise ValueError(f"duration_s must be > 0, got {duration_s!r}")
    if not dt_s > 0:
        raise ValueError(f"dt_s must be > 0, got {dt_s!r}")
    if not 0 <= v_initial <= path.v_clamp:
        raise ValueError(f"v_initial must lie in [0, v_clamp={path.v_clamp}], got {v_initial!r}")

    n = n_steps(duration_s, dt_s)
    t = np.arange(n + 1, dtype=float) * dt_s
    g = irradiance_series(profile, t)
    v, i_pv, i_load, phase = _run(float(v_initial), g, float(dt_s), *path._kernel_args())
    return SimTrace(
        t=t, v_cap=v, phase=phase, i_pv=i_pv, i_load=i_load, dt=float(dt_s),
        events=_find_events(t, v, phase, path.v_clamp), path=path, irradiance=g,
    )


TRACE_HEADER = ["t_s", "v_cap_v", "phase", "i_pv_a", "i_load_a"]
EVENTS_HEADER = ["t_s", "event_name"]


def write_trace_csv(trace: SimTrace, path) -> None:
    labels = [p.value for p in _PHASES]
    lines = [",".join(TRACE_HEADER)]
    for t, v, ph, ipv, il in zip(
        trace.t.tolist(), trace.v_cap.tolist(), trace.phase.tolist(),
        trace.i_pv.tolist(), trace.i_load.tolist(),
    ):
        lines.append(f"{t!r},{v!r},{labels[ph]},{ipv!r},{il!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_events_csv(trace: SimTrace, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(EVENTS_HEADER)
        for e in trace.events:
            w.writerow([repr(e.t_s), e.name])


def read_trace_csv(path) -> SimTrace:
    """Load a trace written by :func:`write_trace_csv`.

    The result carries no :class:`PowerPath`; phases come from the file.
    """
    path = Path(path)
    codes = {p.value: i for i, p in enumerate(_PHASES)}
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != TRACE_HEADER:
            raise ValueError(f"{path}:1: expected header {','.join(TRACE_HEADER)!r}")
        cols = ([], [], [], [], [])
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 5:
                raise ValueError(f"{path}:{lineno}: expected 5 columns, got {len(row)}")
            try:
                cols[0].append(float(row[0]))
                cols[1].append(float(row[1]))
                cols[2].append(codes[row[2]])
                cols[3].append(float(row[3]))
                cols[4].append(float(row[4]))
            except (ValueError, KeyError):
                raise ValueError(f"{path}:{lineno}: malformed row {row!r}") from None
    if len(cols[0]) < 2:
        raise ValueError(f"{path}: need at least two samples")
    t = np.array(cols[0])
    steps = np.diff(t)
    if np.any(steps <= 0):
        raise ValueError(f"{path}: timestamps must be strictly increasing")
    dt = float(t[1] - t[0])
    v = np.array(cols[1])
    phase = np.array(cols[2], dtype=np.int8)
    dark = phase == BLACKOUT
    events = [
        Event(float(t[k + 1]), ENTERED_BLACKOUT if dark[k + 1] else EXITED_BLACKOUT)
        for k in np.flatnonzero(dark[1:] != dark[:-1])
    ]
    return SimTrace(t, v, phase, np.array(cols[3]), np.array(cols[4]), dt, events)
