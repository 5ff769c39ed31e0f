"""
Simulation and sweep configuration.

SimConfig fields double as the keys accepted in key=value config files;
sweep files add the grid keys (event_rates, gammas, biases, trials, base_seed).
"""

import logging
import os
from dataclasses import dataclass, field, fields, replace
from enum import Enum
from typing import Dict, List, Optional

from utils.config_loader import ConfigError, check_known_keys, parse_list

logger = logging.getLogger(__name__)

SEED_ENV_VAR = "LEVY_AUCTION_SEED"
RANDOM_UNIFORM = "random-uniform"


class Bias(str, Enum):
    NO_BIAS = "none"
    QUANTITY = "quantity"

    @classmethod
    def parse(cls, raw: str) -> "Bias":
        aliases = {"none": cls.NO_BIAS, "nobias": cls.NO_BIAS, "no-bias": cls.NO_BIAS,
                   "quantity": cls.QUANTITY, "quantitybias": cls.QUANTITY, "bias": cls.QUANTITY}
        try:
            return aliases[raw.strip().lower()]
        except KeyError:
            raise ConfigError(f"Unknown bias '{raw}' (use none or quantity)", key="bias")


@dataclass
class SimConfig:
    """Parameters of one trial."""

    n_traders: int = 1000
    event_rate: float = 10.0
    gamma: float = 1.5
    u0: float = 1.0
    v_max: Optional[float] = None
    bias: Bias = Bias.NO_BIAS
    noise_fraction: Optional[float] = None  # None draws a uniform fraction per trial
    initial_price: float = 100.0
    max_events: int = 1_000_000
    horizon_seconds: Optional[float] = None
    seed: int = 0
    limit_probability: float = 0.5
    budget_multiple: float = 10.0
    activation_tolerance: float = 0.01
    max_quantity: int = 5

    def validate(self) -> "SimConfig":
        """Raise ConfigError on the first invalid field."""
        checks = [
            ("n_traders", self.n_traders >= 1),
            ("event_rate", self.event_rate > 0),
            ("gamma", self.gamma > 0),
            ("u0", self.u0 > 0),
            ("v_max", self.v_max is None or self.v_max > 0),
            ("noise_fraction", self.noise_fraction is None or 0.0 <= self.noise_fraction <= 1.0),
            ("initial_price", self.initial_price > 0),
            ("max_events", self.max_events >= 1),
            ("horizon_seconds", self.horizon_seconds is None or self.horizon_seconds > 0),
            ("limit_probability", 0.0 <= self.limit_probability <= 1.0),
            ("budget_multiple", self.budget_multiple > 0),
            ("activation_tolerance", self.activation_tolerance >= 0),
            ("max_quantity", self.max_quantity >= 1),
        ]
        for key, ok in checks:
            if not ok:
                raise ConfigError(f"Invalid value for '{key}': {getattr(self, key)}", key=key)
        return self

    @classmethod
    def keys(cls) -> List[str]:
        return [f.name for f in fields(cls)]

    @classmethod
    def from_mapping(cls, values: Dict[str, str], base: Optional["SimConfig"] = None) -> "SimConfig":
        """
        Build a config from raw key=value strings.

        Args:
            values: Raw values keyed by field name
            base: Config whose fields are overridden (defaults if None)

        Returns:
            Validated SimConfig

        Raises:
            ConfigError: On unknown keys or unparsable values
        """
        check_known_keys(values, cls.keys())
        parsed = {key: _parse_field(key, raw) for key, raw in values.items()}
        return replace(base or cls(), **parsed).validate()

    def to_mapping(self) -> Dict[str, str]:
        """Raw string snapshot (inverse of from_mapping)."""
        snapshot = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "noise_fraction" and value is None:
                snapshot[f.name] = RANDOM_UNIFORM
            elif value is None:
                snapshot[f.name] = "none"
            elif isinstance(value, Enum):
                snapshot[f.name] = value.value
            else:
                snapshot[f.name] = repr(value) if isinstance(value, float) else str(value)
        return snapshot


def _parse_optional_float(raw: str) -> Optional[float]:
    return None if raw.strip().lower() in ("", "none") else float(raw)


def _parse_field(key: str, raw: str):
    try:
        if key == "bias":
            return Bias.parse(raw)
        if key == "noise_fraction":
            if raw.strip().lower() in (RANDOM_UNIFORM, "random", "none", ""):
                return None
            return float(raw)
        if key in ("v_max", "horizon_seconds"):
            return _parse_optional_float(raw)
        if key in ("n_traders", "max_events", "seed", "max_quantity"):
            return int(float(raw)) if "e" in raw.lower() else int(raw)
        return float(raw)
    except ValueError:
        raise ConfigError(f"Invalid value for '{key}': '{raw}'", key=key)


def env_seed() -> Optional[int]:
    """Default seed from the environment (lowest precedence)."""
    raw = os.getenv(SEED_ENV_VAR)
    if raw is None or not raw.strip():
        return None
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got '{raw}'", key=SEED_ENV_VAR)


GRID_KEYS = ("event_rates", "gammas", "biases", "trials", "base_seed")


@dataclass
class SweepGrid:
    """Event rates x gammas x bias sets x trials."""

    event_rates: List[float] = field(default_factory=lambda: [1.0, 10.0, 100.0, 1000.0])
    gammas: List[float] = field(default_factory=lambda: [0.5, 1.5, 2.5])
    biases: List[Bias] = field(default_factory=lambda: [Bias.NO_BIAS, Bias.QUANTITY])
    trials: int = 10
    base_seed: int = 0

    def validate(self) -> "SweepGrid":
        if not self.event_rates or not self.gammas or not self.biases or self.trials < 1:
            raise ConfigError("Sweep grid is empty")
        if any(rate <= 0 for rate in self.event_rates):
            raise ConfigError("Event rates must be positive", key="event_rates")
        if any(gamma <= 0 for gamma in self.gammas):
            raise ConfigError("Gammas must be positive", key="gammas")
        return self

    @property
    def cells(self) -> List[Dict]:
        """Cells in deterministic order (rate, then gamma, then bias)."""
        return [
            {"event_rate": rate, "gamma": gamma, "bias": bias}
            for rate in self.event_rates
            for gamma in self.gammas
            for bias in self.biases
        ]

    @property
    def size(self) -> int:
        return len(self.cells) * self.trials


def sweep_from_mapping(values: Dict[str, str]) -> "tuple[SweepGrid, SimConfig]":
    """
    Split a sweep config into the grid and the per-trial base config.

    Args:
        values: Raw key=value mapping

    Returns:
        (SweepGrid, SimConfig)
    """
    check_known_keys(values, list(GRID_KEYS) + SimConfig.keys())
    grid_values = {k: v for k, v in values.items() if k in GRID_KEYS}
    base_values = {k: v for k, v in values.items() if k not in GRID_KEYS}

    grid = SweepGrid()
    if "event_rates" in grid_values:
        grid.event_rates = parse_list(grid_values["event_rates"])
    if "gammas" in grid_values:
        grid.gammas = parse_list(grid_values["gammas"])
    if "biases" in grid_values:
        grid.biases = [Bias.parse(b) for b in parse_list(grid_values["biases"], cast=str)]
    try:
        if "trials" in grid_values:
            grid.trials = int(grid_values["trials"])
        if "base_seed" in grid_values:
            grid.base_seed = int(grid_values["base_seed"])
    except ValueError as e:
        raise ConfigError(f"Invalid grid value: {e}")

    return grid.validate(), SimConfig.from_mapping(base_values)
