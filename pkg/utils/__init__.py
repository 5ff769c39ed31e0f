"""
Utils module
Configuration files, run manifests, quadrature and CSV helpers
"""

from .config_loader import (
    CONFIGS_DIR,
    ConfigError,
    load_config,
    parse_config_text,
    parse_list,
    parse_overrides,
    resolve_config_path,
)
from .csv_io import read_frame, write_frame
from .quadrature import QuadratureError, adaptive_simpson, integrate_segments, quad_real, velocity_average
from .run_manifest import ARTIFACT_VERSION, RunManifest

__all__ = [
    "ARTIFACT_VERSION",
    "CONFIGS_DIR",
    "ConfigError",
    "QuadratureError",
    "RunManifest",
    "adaptive_simpson",
    "integrate_segments",
    "load_config",
    "parse_config_text",
    "parse_list",
    "parse_overrides",
    "quad_real",
    "read_frame",
    "resolve_config_path",
    "velocity_average",
    "write_frame",
]
