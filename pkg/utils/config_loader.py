"""
Loader for flat key=value configuration files kept in the configs/ directory.

Configuration lives outside the code the same way text assets do:
one `key=value` pair per line, `#` starts a comment, blank lines are ignored.
"""

import logging
from pathlib import Path
from typing import Dict, Iterable, List, Optional

logger = logging.getLogger(__name__)

CONFIGS_DIR = Path(__file__).parent.parent / "configs"


class ConfigError(ValueError):
    """Invalid configuration; carries the offending key when there is one."""

    def __init__(self, message: str, key: Optional[str] = None):
        super().__init__(message)
        self.key = key


def resolve_config_path(name: str, configs_dir: Optional[Path] = None) -> Path:
    """
    Find a configuration file.

    An existing path is used as given; otherwise the name is looked up
    in the configs/ directory (with or without the .cfg suffix).

    Args:
        name: File path or bundled config name (e.g. 'desk_scale')
        configs_dir: Optional custom configs directory

    Returns:
        Path to the configuration file

    Raises:
        ConfigError: If no such file exists
    """
    candidate = Path(name)
    if candidate.is_file():
        return candidate

    configs_dir = configs_dir or CONFIGS_DIR
    for option in (configs_dir / name, configs_dir / f"{name}.cfg"):
        if option.is_file():
            return option

    logger.error(f"Config file not found: {name}")
    raise ConfigError(f"Config file '{name}' not found")


def parse_config_text(text: str, source: str = "<text>") -> Dict[str, str]:
    """
    Parse key=value lines.

    Args:
        text: File content
        source: Name used in error messages

    Returns:
        Ordered mapping of keys to raw string values

    Raises:
        ConfigError: On malformed lines or repeated keys
    """
    values: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key=value, got '{raw.strip()}'")

        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{lineno}: empty key")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key '{key}'", key=key)
        values[key] = value
    return values


def load_config(name: str, configs_dir: Optional[Path] = None) -> Dict[str, str]:
    """
    Load a configuration file into a raw mapping.

    Args:
        name: File path or bundled config name
        configs_dir: Optional custom configs directory

    Returns:
        Mapping of keys to raw string values
    """
    path = resolve_config_path(name, configs_dir)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        logger.error(f"Error reading config file {path}: {e}")
        raise ConfigError(f"Cannot read config file '{path}': {e}")

    values = parse_config_text(text, source=str(path))
    logger.debug(f"Loaded {len(values)} config keys from {path}")
    return values


def parse_overrides(pairs: Iterable[str]) -> Dict[str, str]:
    """
    Parse repeated `--set key=value` command-line overrides.

    Args:
        pairs: Strings of the form key=value

    Returns:
        Mapping of keys to raw string values
    """
    overrides: Dict[str, str] = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"Override must be key=value, got '{pair}'")
        key, value = (part.strip() for part in pair.split("=", 1))
        overrides[key] = value
    return overrides


def check_known_keys(values: Dict[str, str], allowed: Iterable[str]) -> None:
    """Raise ConfigError naming the first key that is not allowed."""
    allowed = set(allowed)
    for key in values:
        if key not in allowed:
            raise ConfigError(f"Unknown config key '{key}'", key=key)


def parse_list(raw: str, cast=float) -> List:
    """Parse a comma-separated list ('1, 10, 100')."""
    items = [item.strip() for item in raw.split(",") if item.strip()]
    try:
        return [cast(item) for item in items]
    except ValueError as e:
        raise ConfigError(f"Invalid list value '{raw}': {e}")
