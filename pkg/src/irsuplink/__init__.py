"""Slot-level simulator of a mobility-aware IRS-assisted multi-node uplink."""

from .config import ConfigError, DerivedConstants, SimConfig, derive_constants, dump_config, load_config
from .engine import RunResult, run_batch, run_simulation

__all__ = [
    "ConfigError",
    "DerivedConstants",
    "RunResult",
    "SimConfig",
    "derive_constants",
    "dump_config",
    "load_config",
    "run_batch",
    "run_simulation",
]
