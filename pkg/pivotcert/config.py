"""
Settings discovery for pivotcert.

Values are resolved in the following priority order (last wins):
1. Built-in defaults
2. pivotcert.yaml named by PIVOTCERT_CONFIG, or found in the current
   directory or any parent directory
3. PIVOTCERT_<FIELD> environment variables (a nearby .env is loaded first)
4. Explicit overrides passed by the caller (the CLI passes its flags here)

Usage:
    from pivotcert.config import load_settings

    settings = load_settings()
    settings = load_settings(overrides={"threads": 4})
"""

from __future__ import annotations

import dataclasses
import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Optional

import yaml
from dotenv import load_dotenv

from pivotcert.errors import ConfigError

logger = logging.getLogger(__name__)

CONFIG_FILE_NAMES = ["pivotcert.yaml", "pivotcert.yml", ".pivotcert.yaml"]
ENV_PREFIX = "PIVOTCERT_"
LOG_LEVELS = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}


@dataclass(frozen=True)
class Settings:
    iso_cap: int = 12
    oracle_max_n: int = 10
    max_orbit: int = 1_000_000
    threads: int = 1
    log_level: str = "INFO"
    restriction_alpha: float = 0.5
    strict_sweeps: bool = False

    def __post_init__(self) -> None:
        problems = []
        if self.iso_cap < 1:
            problems.append(f"iso_cap must be positive, got {self.iso_cap}")
        if self.oracle_max_n < 1:
            problems.append(f"oracle_max_n must be positive, got {self.oracle_max_n}")
        if self.max_orbit < 1:
            problems.append(f"max_orbit must be positive, got {self.max_orbit}")
        if self.threads < 1:
            problems.append(f"threads must be at least 1, got {self.threads}")
        if self.log_level.upper() not in LOG_LEVELS:
            problems.append(f"log_level must be one of {sorted(LOG_LEVELS)}, got {self.log_level!r}")
        if not 0 < self.restriction_alpha < 1:
            problems.append(f"restriction_alpha must lie in (0, 1), got {self.restriction_alpha}")
        if problems:
            raise ConfigError("; ".join(problems))


def _find_config_in_directory(directory: Path) -> Optional[Path]:
    """Find the first matching settings file in a directory"""
    for name in CONFIG_FILE_NAMES:
        candidate = directory / name
        if candidate.is_file():
            return candidate
    return None


def _walk_up_for_config(start_dir: Optional[Path] = None) -> Optional[Path]:
    """Walk up the directory tree to find a settings file"""
    current = (start_dir or Path.cwd()).resolve()
    while True:
        found = _find_config_in_directory(current)
        if found:
            return found
        if current.parent == current:
            return None
        current = current.parent


def _coerce(name: str, raw: Any) -> Any:
    field_types = {f.name: f.type for f in dataclasses.fields(Settings)}
    if name not in field_types:
        raise ConfigError(f"unknown setting: {name}")
    kind = field_types[name]
    try:
        if kind == "bool":
            if isinstance(raw, bool):
                return raw
            text = str(raw).strip().lower()
            if text in {"1", "true", "yes", "on"}:
                return True
            if text in {"0", "false", "no", "off"}:
                return False
            raise ValueError(raw)
        if kind == "int":
            if isinstance(raw, bool):
                raise ValueError(raw)
            return int(raw)
        if kind == "float":
            return float(raw)
        return str(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"setting {name} expects {kind}, got {raw!r}") from exc


def _read_yaml(path: Path) -> dict[str, Any]:
    try:
        with path.open("r", encoding="utf-8") as handle:
            data = yaml.safe_load(handle)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must contain a mapping, got {type(data).__name__}")
    return {str(key): _coerce(str(key), value) for key, value in data.items()}


def _read_env() -> dict[str, Any]:
    values: dict[str, Any] = {}
    for field in dataclasses.fields(Settings):
        raw = os.getenv(ENV_PREFIX + field.name.upper())
        if raw is not None and raw != "":
            values[field.name] = _coerce(field.name, raw)
    return values


def load_settings(
    config_file: Optional[str | Path] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    use_env: bool = True,
) -> Settings:
    """
    Resolve settings from defaults, a YAML file, the environment and overrides.

    Args:
        config_file: Explicit settings file; skips discovery when given
        overrides: Highest-priority values, typically CLI flags; None entries are ignored
        use_env: Consult .env files and PIVOTCERT_* variables

    Returns:
        A validated Settings instance

    Raises:
        ConfigError: unreadable file, unknown key or ill-typed value
    """
    values: dict[str, Any] = {}

    if use_env:
        load_dotenv(override=False)

    path: Optional[Path] = None
    if config_file is not None:
        path = Path(config_file)
        if not path.is_file():
            raise ConfigError(f"settings file not found: {path}")
    elif use_env and os.getenv(ENV_PREFIX + "CONFIG"):
        path = Path(os.environ[ENV_PREFIX + "CONFIG"])
        if not path.is_file():
            raise ConfigError(f"{ENV_PREFIX}CONFIG points to a missing file: {path}")
    else:
        path = _walk_up_for_config()

    if path is not None:
        logger.debug(f"Loading settings from {path}")
        values.update(_read_yaml(path))

    if use_env:
        values.update(_read_env())

    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = _coerce(key, value)

    return Settings(**values)
