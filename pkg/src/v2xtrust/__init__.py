"""Two-level trust simulation for V2X networks.

Road entities score their neighbours (direct, indirect and local trust), warn
nearby road-side units, and a central authority turns RSU alarms into a global
blacklist that is pushed back to every entity.
"""

from .config import ConfigError, ScenarioConfig, load_config
from .metrics import compute_fnr_fpr, compute_pdr, improvement_rate
from .simulation import MetricsReport, Simulation, run_scenario
from .sweep import SweepTable, sweep

__all__ = [
    "ConfigError",
    "MetricsReport",
    "ScenarioConfig",
    "Simulation",
    "SweepTable",
    "compute_fnr_fpr",
    "compute_pdr",
    "improvement_rate",
    "load_config",
    "run_scenario",
    "sweep",
]
