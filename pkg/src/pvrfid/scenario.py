"""Scenario files: ``[section]`` headers with ``key = value`` lines, ``#`` comments.

Every key is optional; omitted keys take the defaults in ``DEFAULTS``. Units
are SI unless the key name says otherwise:

[link]    p_tx_dbm (dBm), g_product (-), tau (-), frequency_hz (Hz),
          eirp_mode (bool), matching_csv (path), sweep_f_lo_hz (Hz),
          sweep_f_hi_hz (Hz), sweep_points (count)
[ic]      sensitivity_passive_dbm (dBm), sensitivity_semipassive_dbm (dBm),
          v_readwrite (V), v_eeprom (V), i_operating (A), duty_cycle (-)
[power]   area_cm2 (cm^2), j_sc_stc (A/cm^2 at 1000 W/m^2), v_max (V),
          v_diode (V), v_clamp (V), capacitance_f (F), i_leak (A)
[light]   profile (constant|square|sinusoidal|sampled), g_wm2 (W/m^2; day
          level or peak), day_start_s (s), day_length_s (s), period_s (s),
          csv (path, for sampled)
[reader]  attempt_rate_hz (Hz), success_prob (-), distance_m (m),
          population (count), rng_seed (int), duration_s (s; 0 = whole trace)
[sim]     duration_s (s), dt_s (s), v_initial (V), warmup_s (s or "auto" =
          one light period), out_prefix (path)

Relative paths resolve against the scenario file's directory.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

from . import insolation
from .energy_model import PowerPath, PvCell, SimTrace, simulate
from .insolation import IrradianceProfile
from .interrogation import ReaderConfig
from .link_budget import IcProfile, LinkParams, MatchingProfile


class ScenarioError(ValueError):
    pass


DEFAULTS: dict[str, dict[str, object]] = {
    "link": {
        "p_tx_dbm": 30.0,
        "g_product": 0.8,
        "tau": 0.8,
        "frequency_hz": 915e6,
        "eirp_mode": False,
        "matching_csv": "",
        "sweep_f_lo_hz": 800e6,
        "sweep_f_hi_hz": 1000e6,
        "sweep_points": 201,
    },
    "ic": {
        "sensitivity_passive_dbm": -21.0,
        "sensitivity_semipassive_dbm": -31.0,
        "v_readwrite": 1.5,
        "v_eeprom": 3.0,
        "i_operating": 10e-6,
        "duty_cycle": 1.0,
    },
    "power": {
        "area_cm2": 12.0,
        "j_sc_stc": 8e-3,
        "v_max": 4.0,
        "v_diode": 0.0,
        "v_clamp": 2.7,
        "capacitance_f": 1.0,
        "i_leak": 1e-6,
    },
    "light": {
        "profile": "square",
        "g_wm2": 1000.0,
        "day_start_s": 0.0,
        "day_length_s": 43_200.0,
        "period_s": 86_400.0,
        "csv": "",
    },
    "reader": {
        "attempt_rate_hz": 4.0,
        "success_prob": 0.3875,
        "distance_m": 2.0,
        "population": 0,
        "rng_seed": 0,
        "duration_s": 0.0,
    },
    "sim": {
        "duration_s": 259_200.0,
        "dt_s": 1.0,
        "v_initial": 0.0,
        "warmup_s": "auto",
        "out_prefix": "",
    },
}

PROFILES = ("constant", "square", "sinusoidal", "sampled")


@dataclass(frozen=True)
class Scenario:
    name: str
    link: LinkParams
    ic: IcProfile
    path: PowerPath
    profile: IrradianceProfile
    reader: ReaderConfig
    duration_s: float
    dt_s: float
    v_initial: float = 0.0
    warmup_s: float = 0.0
    campaign_duration_s: float | None = None
    matching: MatchingProfile | None = None
    sweep_f_lo_hz: float = 800e6
    sweep_f_hi_hz: float = 1000e6
    sweep_points: int = 201
    out_prefix: str = ""

    def __post_init__(self):
        if not self.dt_s <= self.duration_s / 10:
            raise ScenarioError(
                f"[sim] dt_s must be <= duration_s / 10 ({self.dt_s} > {self.duration_s / 10})"
            )
        if not 0 <= self.v_initial <= self.path.v_clamp:
            raise ScenarioError(
                f"[sim] v_initial must lie in [0, v_clamp={self.path.v_clamp}], got {self.v_initial}"
            )
        if not 0 <= self.warmup_s < self.duration_s:
            raise ScenarioError(
                f"[sim] warmup_s must lie in [0, duration_s={self.duration_s}), got {self.warmup_s}"
            )

    def with_capacitance(self, capacitance_f: float) -> "Scenario":
        return replace(self, path=self.path.with_capacitance(capacitance_f))

    def with_overrides(self, duration_s=None, dt_s=None, seed=None, warmup_s=None) -> "Scenario":
        out = self
        if dt_s is not None:
            out = replace(out, dt_s=float(dt_s))
        if duration_s is not None:
            # keep the warmup valid for a shorter run
            out = replace(out, duration_s=float(duration_s),
                          warmup_s=min(out.warmup_s, _default_warmup(out.profile, float(duration_s))))
        if warmup_s is not None:
            out = replace(out, warmup_s=float(warmup_s))
        if seed is not None:
            out = replace(out, reader=replace(out.reader, rng_seed=int(seed)))
        return out

    def run_simulation(self) -> SimTrace:
        return simulate(self.path, self.profile, self.duration_s, self.dt_s, self.v_initial)

    def sweep_matching(self) -> MatchingProfile:
        if self.matching is not None:
            return self.matching
        return MatchingProfile.constant(self.link.tau, self.link.frequency_hz)


def _default_warmup(profile, duration_s: float) -> float:
    period = getattr(profile, "period_s", None)
    if period is None or period >= duration_s:
        return 0.0
    return float(period)


def _convert(section: str, key: str, raw: str, default):
    try:
        if isinstance(default, bool):
            low = raw.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
    except ValueError:
        kind = {bool: "a boolean", int: "an integer", float: "a number"}[type(default)]
        raise ScenarioError(f"[{section}] {key}: expected {kind}, got {raw!r}") from None
    return raw.strip()


def _build(section: str, factory, **kwargs):
    try:
        return factory(**kwargs)
    except ScenarioError:
        raise
    except (ValueError, TypeError) as exc:
        raise ScenarioError(f"[{section}] {exc}") from None


def parse_scenario(text: str, name: str = "scenario", base_dir: Path | None = None) -> Scenario:
    """Parse scenario text; see the module docstring for the key table."""
    base_dir = Path(".") if base_dir is None else Path(base_dir)
    cp = configparser.ConfigParser(
        interpolation=None, comment_prefixes=("#",), inline_comment_prefixes=("#",),
        default_section="__none__", strict=True,
    )
    cp.optionxform = str  # keys are case-sensitive
    try:
        cp.read_string(text, source=name)
    except configparser.Error as exc:
        raise ScenarioError(f"{name}: {exc}") from None

    values = {sec: dict(keys) for sec, keys in DEFAULTS.items()}
    for sec in cp.sections():
        if sec not in DEFAULTS:
            raise ScenarioError(f"unknown section [{sec}]")
        for key, raw in cp.items(sec):
            if key not in DEFAULTS[sec]:
                raise ScenarioError(f"[{sec}] unknown key {key!r}")
            values[sec][key] = _convert(sec, key, raw, DEFAULTS[sec][key])

    lk, icv, pw, lt, rd, sm = (values[s] for s in ("link", "ic", "power", "light", "reader", "sim"))

    link = _build("link", LinkParams, p_tx_dbm=lk["p_tx_dbm"], g_product=lk["g_product"],
                  tau=lk["tau"], frequency_hz=lk["frequency_hz"], eirp_mode=lk["eirp_mode"])
    matching = None
    if lk["matching_csv"]:
        try:
            matching = MatchingProfile.from_csv(base_dir / lk["matching_csv"])
        except ValueError as exc:
            raise ScenarioError(f"[link] matching_csv: {exc}") from None
    if lk["sweep_points"] < 2:
        raise ScenarioError(f"[link] sweep_points must be >= 2, got {lk['sweep_points']}")
    if not lk["sweep_f_lo_hz"] < lk["sweep_f_hi_hz"]:
        raise ScenarioError("[link] sweep_f_lo_hz must be < sweep_f_hi_hz")

    ic = _build("ic", IcProfile, **icv)
    pv = _build("power", PvCell, area_cm2=pw["area_cm2"], j_sc_stc=pw["j_sc_stc"], v_max=pw["v_max"])
    path = _build("power", PowerPath, pv=pv, v_diode=pw["v_diode"], v_clamp=pw["v_clamp"],
                  capacitance_f=pw["capacitance_f"], i_leak=pw["i_leak"], ic=ic)

    kind = lt["profile"]
    if kind == "constant":
        profile = _build("light", insolation.Constant, g_wm2=lt["g_wm2"])
    elif kind == "square":
        profile = _build("light", insolation.Square, g_day_wm2=lt["g_wm2"],
                         day_start_s=lt["day_start_s"], day_length_s=lt["day_length_s"],
                         period_s=lt["period_s"])
    elif kind == "sinusoidal":
        profile = _build("light", insolation.SinusoidalDiurnal, g_peak_wm2=lt["g_wm2"],
                         period_s=lt["period_s"])
    elif kind == "sampled":
        if not lt["csv"]:
            raise ScenarioError("[light] profile = sampled requires csv")
        try:
            profile = insolation.from_csv(base_dir / lt["csv"])
        except ValueError as exc:
            raise ScenarioError(f"[light] csv: {exc}") from None
    else:
        raise ScenarioError(f"[light] profile must be one of {', '.join(PROFILES)}, got {kind!r}")

    campaign = rd.pop("duration_s")
    reader = _build("reader", ReaderConfig, **rd)

    for key in ("duration_s", "dt_s"):
        if not sm[key] > 0:
            raise ScenarioError(f"[sim] {key} must be > 0, got {sm[key]}")
    warmup = sm["warmup_s"]
    if warmup == "auto":
        warmup = _default_warmup(profile, sm["duration_s"])
    else:
        warmup = _convert("sim", "warmup_s", warmup, 0.0)
    if campaign < 0:
        raise ScenarioError(f"[reader] duration_s must be >= 0, got {campaign}")

    return Scenario(
        name=name, link=link, ic=ic, path=path, profile=profile, reader=reader,
        duration_s=sm["duration_s"], dt_s=sm["dt_s"], v_initial=sm["v_initial"],
        warmup_s=warmup, campaign_duration_s=campaign or None, matching=matching,
        sweep_f_lo_hz=lk["sweep_f_lo_hz"], sweep_f_hi_hz=lk["sweep_f_hi_hz"],
        sweep_points=lk["sweep_points"], out_prefix=sm["out_prefix"] or name,
    )


def shipped_dir():
    return resources.files("pvrfid") / "scenarios"


def shipped_scenarios() -> list[str]:
    return sorted(p.name for p in shipped_dir().iterdir() if p.name.endswith(".scenario"))


def resolve_scenario_path(path) -> Path:
    """Return ``path`` if it exists, else the bundled scenario of that name."""
    p = Path(path)
    if p.exists():
        return p
    bundled = Path(str(shipped_dir() / p.name))
    if p.parent == Path(".") and bundled.exists():
        return bundled
    raise FileNotFoundError(f"scenario file not found: {path}")


def load_scenario(path) -> Scenario:
    p = resolve_scenario_path(path)
    return parse_scenario(p.read_text(), name=p.stem, base_dir=p.parent)
