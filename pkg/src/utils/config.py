"""Configuration utilities for the Riccati inequality analyzer.

This module loads numeric defaults (tolerances, search budgets, frequency grid
and trace settings) and logging options from ``config/analysis.yaml``. Library
functions never read the file themselves: the dataclass defaults below are the
same values, so the API is usable without any configuration on disk.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import structlog
import yaml

# Initialize logger
logger = structlog.get_logger(__name__)

CONFIG_FILENAME = "analysis.yaml"


@dataclass(frozen=True)
class LoggingConfig:
    """Logging configuration."""

    level: str = "WARNING"
    file: str | None = None
    json_format: bool = False


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical tolerances, all relative to the norm of the matrix they apply to."""

    linalg: float = 1e-9
    axis: float = 1e-7
    rank: float = 1e-6


@dataclass(frozen=True)
class SearchConfig:
    """Budgets for the positive definite Delta G search."""

    eps_min_factor: float = 1e-8
    eps_max_factor: float = 1e4
    bisection_steps: int = 60
    migration_steps: int = 200
    jitter_retries: int = 8
    escalation_steps: int = 6
    seed: int = 0


@dataclass(frozen=True)
class GridConfig:
    """Frequency grid for the Kalman-Yakubovich diagnostic."""

    points: int = 2048
    omega_max: float | None = None


@dataclass(frozen=True)
class TraceConfig:
    """Eigenvalue trajectory tracing defaults."""

    t_max: float = 1.0
    steps: int = 200
    delta: float = 1.0
    max_halvings: int = 6


@dataclass(frozen=True)
class Config:
    """Main configuration object."""

    logging: LoggingConfig = field(default_factory=LoggingConfig)
    tolerances: ToleranceConfig = field(default_factory=ToleranceConfig)
    search: SearchConfig = field(default_factory=SearchConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    trace: TraceConfig = field(default_factory=TraceConfig)


def _section(raw: dict[str, Any], name: str) -> dict[str, Any]:
    section = raw[name]
    if not isinstance(section, dict):
        error_msg = f"Section '{name}' must be a mapping"
        raise ValueError(error_msg)
    return section


def get_config(config_dir: Path) -> Config:
    """Load configuration from the YAML file in the config directory.

    The ``tolerances`` section is required; every other section falls back to
    its defaults when absent.

    Args:
        config_dir: Path to configuration directory

    Returns:
        Config object with all settings
    """
    config_path = config_dir / CONFIG_FILENAME
    if not config_path.exists():
        logger.warning("Analysis configuration not found", path=str(config_path))
        error_msg = f"Configuration file not found: {config_path}"
        raise FileNotFoundError(error_msg)

    try:
        with open(config_path) as f:
            raw = yaml.safe_load(f) or {}
    except yaml.YAMLError as err:
        logger.exception("Invalid YAML in configuration file", error=str(err))
        error_msg = f"Configuration error in YAML: {err}"
        raise ValueError(error_msg) from err

    try:
        tolerances = _section(raw, "tolerances")
        tolerance_config = ToleranceConfig(
            linalg=float(tolerances["linalg"]),
            axis=float(tolerances["axis"]),
            rank=float(tolerances.get("rank", ToleranceConfig.rank)),
        )
    except KeyError as err:
        logger.exception("Missing required configuration key", error=str(err))
        error_msg = f"Missing required configuration key: {err}"
        raise KeyError(error_msg) from err

    logging_config = LoggingConfig(**raw["logging"]) if "logging" in raw else LoggingConfig()
    search_config = SearchConfig(**raw["search"]) if "search" in raw else SearchConfig()
    grid_config = GridConfig(**raw["grid"]) if "grid" in raw else GridConfig()
    trace_config = TraceConfig(**raw["trace"]) if "trace" in raw else TraceConfig()

    return Config(
        logging=logging_config,
        tolerances=tolerance_config,
        search=search_config,
        grid=grid_config,
        trace=trace_config,
    )
