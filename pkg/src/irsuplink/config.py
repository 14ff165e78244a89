"""Simulation parameters and the physical constants derived from them.

Config files are flat TOML: one ``key = value`` per line, ``#`` comments,
SI units unless the key name says otherwise (``_db``, ``_dbm``). Every key is
optional; missing keys take the defaults below (the reference scenario).
"""

from __future__ import annotations

import dataclasses
import hashlib
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised only on 3.10
    import tomli as tomllib

SPEED_OF_LIGHT = 299_792_458.0  # m/s, exact
BOLTZMANN = 1.380649e-23  # J/K, exact
REFERENCE_TEMPERATURE_K = 290.0

SEED_ENV_VAR = "IRSUPLINK_SEED"

PHASE_MODES = ("geometric", "csi", "random")

Vec3 = tuple[float, float, float]


class ConfigError(ValueError):
    """Raised for malformed config text or a parameter that violates its constraint."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message if key is None else f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class SimConfig:
    carrier_frequency_hz: float = 3.5e9
    bandwidth_hz: float = 5e6
    num_channels: int = 4
    num_nodes: int = 10
    irs_rows: int = 8
    irs_cols: int = 8
    element_spacing_wavelengths: float = 0.5
    phase_bits: int = 3
    reflection_efficiency: float = 0.98
    pathloss_exponent: float = 2.2
    tx_power_dbm: float = 20.0
    noise_figure_db: float = 6.0
    decode_threshold_db: float = -10.0
    sensing_samples: int = 128
    target_pfa: float = 0.1
    v_max_mps: float = 3.0
    slot_duration_s: float = 5e-3
    num_slots: int = 200
    window: int = 20
    priority_exponent: float = 2.0
    rate_epsilon: float = 1e3  # bit/s
    bs_position: Vec3 = (0.0, 0.0, 10.0)
    irs_center: Vec3 = (30.0, 0.0, 8.0)
    region_min: Vec3 = (-50.0, -50.0, 0.0)
    region_max: Vec3 = (50.0, 50.0, 3.0)
    # IRS panel orientation: columns run along irs_col_axis, rows along irs_row_axis
    irs_col_axis: Vec3 = (0.0, 1.0, 0.0)
    irs_row_axis: Vec3 = (0.0, 0.0, 1.0)
    coherence_floor_s: float = 1e-3
    # "random" draws uniform phases each slot; it exists as a no-focusing control
    phase_mode: str = "geometric"
    seed: int = 42

    def __post_init__(self):
        _validate(self)

    @property
    def num_elements(self) -> int:
        return self.irs_rows * self.irs_cols

    def replace(self, **changes) -> "SimConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in dataclasses.fields(self)}

    def digest(self) -> str:
        """SHA-256 of the canonical serialization; echoed into run outputs."""
        return hashlib.sha256(dump_config(self).encode("utf-8")).hexdigest()


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(SimConfig)}
_INT_KEYS = {k for k, t in _FIELD_TYPES.items() if t == "int"}
_VEC_KEYS = {k for k, t in _FIELD_TYPES.items() if t == "Vec3"}
_STR_KEYS = {"phase_mode"}


def _require(cond: bool, key: str, message: str) -> None:
    if not cond:
        raise ConfigError(message, key)


def _validate(cfg: SimConfig) -> None:
    for key in ("carrier_frequency_hz", "bandwidth_hz", "element_spacing_wavelengths",
                "pathloss_exponent", "slot_duration_s", "rate_epsilon", "coherence_floor_s"):
        value = getattr(cfg, key)
        _require(math.isfinite(value) and value > 0, key, f"must be positive, got {value}")
    for key in ("num_channels", "num_nodes", "irs_rows", "irs_cols",
                "sensing_samples", "num_slots", "window"):
        value = getattr(cfg, key)
        _require(value >= 1, key, f"must be a positive integer, got {value}")
    # b = 0 would collapse every phase onto a single level
    _require(cfg.phase_bits >= 1, "phase_bits", f"must be >= 1, got {cfg.phase_bits}")
    _require(0.0 <= cfg.reflection_efficiency <= 1.0, "reflection_efficiency",
             f"must lie in [0, 1], got {cfg.reflection_efficiency}")
    _require(0.0 < cfg.target_pfa < 1.0, "target_pfa",
             f"must lie in (0, 1), got {cfg.target_pfa}")
    _require(math.isfinite(cfg.v_max_mps) and cfg.v_max_mps >= 0, "v_max_mps",
             f"must be non-negative, got {cfg.v_max_mps}")
    _require(cfg.priority_exponent >= 1, "priority_exponent",
             f"must be >= 1, got {cfg.priority_exponent}")
    for key in ("tx_power_dbm", "noise_figure_db", "decode_threshold_db"):
        _require(math.isfinite(getattr(cfg, key)), key, "must be finite")
    _require(cfg.window <= cfg.num_slots, "window",
             f"window ({cfg.window}) must not exceed num_slots ({cfg.num_slots})")
    _require(cfg.phase_mode in PHASE_MODES, "phase_mode",
             f"must be one of {PHASE_MODES}, got {cfg.phase_mode!r}")
    _require(0 <= cfg.seed < 2**64, "seed", f"must be an unsigned 64-bit integer, got {cfg.seed}")
    for key in _VEC_KEYS:
        _require(all(math.isfinite(c) for c in getattr(cfg, key)), key, "must be finite")
    lo, hi = cfg.region_min, cfg.region_max
    _require(hi[0] > lo[0] and hi[1] > lo[1], "region_max",
             "region must have strictly positive extent in x and y")
    _require(hi[2] >= lo[2], "region_max", "region z extent must be non-negative")
    col, row = np.asarray(cfg.irs_col_axis), np.asarray(cfg.irs_row_axis)
    for key, axis in (("irs_col_axis", col), ("irs_row_axis", row)):
        _require(abs(np.linalg.norm(axis) - 1.0) <= 1e-9, key, "must be a unit vector")
    _require(abs(float(col @ row)) <= 1e-9, "irs_row_axis", "must be orthogonal to irs_col_axis")


def _coerce(key: str, value):
    if key in _INT_KEYS:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"expected an integer, got {value!r}", key)
        if isinstance(value, float):
            if not value.is_integer():
                raise ConfigError(f"expected an integer, got {value!r}", key)
            value = int(value)
        return value
    if key in _VEC_KEYS:
        if not isinstance(value, list) or len(value) != 3:
            raise ConfigError(f"expected a list of 3 numbers, got {value!r}", key)
        return tuple(_coerce_float(key, v) for v in value)
    if key in _STR_KEYS:
        if not isinstance(value, str):
            raise ConfigError(f"expected a string, got {value!r}", key)
        return value
    return _coerce_float(key, value)


def _coerce_float(key: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", key)
    return float(value)


def config_from_mapping(values: Mapping) -> SimConfig:
    unknown = sorted(set(values) - set(_FIELD_TYPES))
    if unknown:
        raise ConfigError(f"unknown key(s): {', '.join(unknown)}")
    return SimConfig(**{k: _coerce(k, v) for k, v in values.items()})


def load_config(source: str) -> SimConfig:
    """Parse config text. Missing keys take defaults; the empty string is valid."""
    try:
        values = tomllib.loads(source)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"parse error: {exc}") from exc
    nested = [k for k, v in values.items() if isinstance(v, dict)]
    if nested:
        raise ConfigError(f"tables are not supported, found: {', '.join(nested)}")
    return config_from_mapping(values)


def load_config_file(path: str | os.PathLike) -> SimConfig:
    return load_config(Path(path).read_text(encoding="utf-8"))


def apply_env_overrides(cfg: SimConfig, environ: Mapping[str, str] | None = None) -> SimConfig:
    """Only the seed may be overridden from the environment."""
    environ = os.environ if environ is None else environ
    raw = environ.get(SEED_ENV_VAR)
    if raw is None or raw.strip() == "":
        return cfg
    try:
        seed = int(raw, 0)
    except ValueError as exc:
        raise ConfigError(f"{SEED_ENV_VAR}={raw!r} is not an integer", "seed") from exc
    return cfg.replace(seed=seed)


def _fmt(value) -> str:
    if isinstance(value, str):
        return f'"{value}"'
    if isinstance(value, tuple):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    return repr(value)


def dump_config(cfg: SimConfig) -> str:
    """Serialize to the same flat format ``load_config`` reads (exact float round-trip)."""
    return "".join(f"{k} = {_fmt(v)}\n" for k, v in cfg.to_dict().items())


@dataclass(frozen=True, eq=False)
class DerivedConstants:
    wavelength: float
    L0: float
    d0: float
    noise_power: float  # W
    tx_power: float  # W
    decode_threshold_linear: float
    element_positions: np.ndarray = field(repr=False)  # (N, 3), row-major over (row, col)
    irs_to_bs_distances: np.ndarray = field(repr=False)  # (N,)
    bs_position: np.ndarray = field(repr=False)
    irs_center: np.ndarray = field(repr=False)


def element_grid(center, col_axis, row_axis, rows: int, cols: int, spacing: float) -> np.ndarray:
    """Centered rows x cols grid of element positions, row-major (n = row * cols + col)."""
    center = np.asarray(center, dtype=float)
    r = (np.arange(rows) - (rows - 1) / 2.0) * spacing
    c = (np.arange(cols) - (cols - 1) / 2.0) * spacing
    rr, cc = np.meshgrid(r, c, indexing="ij")
    offsets = rr.reshape(-1, 1) * np.asarray(row_axis, float) + cc.reshape(-1, 1) * np.asarray(col_axis, float)
    return center + offsets


def derive_constants(cfg: SimConfig) -> DerivedConstants:
    wavelength = SPEED_OF_LIGHT / cfg.carrier_frequency_hz
    noise_power = BOLTZMANN * REFERENCE_TEMPERATURE_K * cfg.bandwidth_hz * 10.0 ** (cfg.noise_figure_db / 10.0)
    elements = element_grid(cfg.irs_center, cfg.irs_col_axis, cfg.irs_row_axis,
                            cfg.irs_rows, cfg.irs_cols, cfg.element_spacing_wavelengths * wavelength)
    bs = np.asarray(cfg.bs_position, dtype=float)
    return DerivedConstants(
        wavelength=wavelength,
        L0=(4.0 * math.pi / wavelength) ** 2,
        d0=wavelength / (2.0 * math.pi),
        noise_power=noise_power,
        tx_power=10.0 ** ((cfg.tx_power_dbm - 30.0) / 10.0),
        decode_threshold_linear=10.0 ** (cfg.decode_threshold_db / 10.0),
        element_positions=elements,
        irs_to_bs_distances=np.linalg.norm(elements - bs, axis=1),
        bs_position=bs,
        irs_center=np.asarray(cfg.irs_center, dtype=float),
    )
