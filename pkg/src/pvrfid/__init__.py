"""Read-range, power-path and availability toolkit for PV-assisted battery-less RFID tags."""

from .energy_model import EnergyState, Phase, PowerPath, PvCell, SimTrace, simulate, step, time_to_blackout
from .insolation import Constant, Sampled, SinusoidalDiurnal, Square, irradiance_at
from .interrogation import CampaignResult, ReaderConfig, ReadResult, attempt_read, run_campaign
from .link_budget import (
    IcProfile,
    LinkParams,
    MatchingProfile,
    dbm_to_watts,
    range_ratio,
    range_sweep,
    read_range,
    received_power,
    watts_to_dbm,
)
from .scenario import Scenario, load_scenario
from .sizing import availability, min_capacitance

__version__ = "0.1.0"

__all__ = [
    "CampaignResult", "Constant", "EnergyState", "IcProfile", "LinkParams", "MatchingProfile",
    "Phase", "PowerPath", "PvCell", "ReadResult", "ReaderConfig", "Sampled", "Scenario",
    "SimTrace", "SinusoidalDiurnal", "Square", "attempt_read", "availability", "dbm_to_watts",
    "irradiance_at", "load_scenario", "min_capacitance", "range_ratio", "range_sweep",
    "read_range", "received_power", "run_campaign", "simulate", "step", "time_to_blackout",
    "watts_to_dbm",
]
