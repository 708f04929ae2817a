"""
Configuration Parser for pin2homalg

This module handles loading, parsing, and validating YAML configuration files
for engine runs. Command-line flags override the values read here.
"""

import os
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple

import structlog
import yaml
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from .exceptions import BadInputError

logger = structlog.get_logger(__name__)

GOLDEN_ENV = "PIN2HOMALG_GOLDEN_DIR"
DEFAULT_CONFIG = Path("config/default_config.yml")
DEFAULT_GOLDEN = Path("config/golden")


def parse_window(value: Any) -> Optional[Tuple[int, int]]:
    """Accept "lo:hi", [lo, hi] or None."""
    if value is None:
        return None
    if isinstance(value, str):
        try:
            lo, hi = (int(part) for part in value.split(":"))
        except ValueError as exc:
            raise ValueError(f"window must look like lo:hi, got {value!r}") from exc
    else:
        lo, hi = (int(v) for v in value)
    if lo > hi:
        raise ValueError(f"window lower end {lo} exceeds upper end {hi}")
    return (lo, hi)


class LoggingConfig(BaseModel):
    """Logging settings."""
    level: str = "WARNING"
    json_logs: bool = False

    @field_validator("level")
    @classmethod
    def validate_level(cls, v: str) -> str:
        if v.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"unknown log level {v!r}")
        return v.upper()


class EngineConfig(BaseModel):
    """Numerical settings shared by every command."""
    precision: int = Field(ge=1, le=64, default=6)
    window: Optional[Tuple[int, int]] = None
    n_max: int = Field(ge=0, le=32, default=6)
    r_max: int = Field(ge=1, le=32, default=4)
    bar_max_dim: Optional[int] = Field(gt=0, default=4000)
    seed: int = 0
    logging: LoggingConfig = Field(default_factory=LoggingConfig)

    @field_validator("window", mode="before")
    @classmethod
    def validate_window(cls, v):
        return parse_window(v)


class RunConfig(BaseModel):
    """One command invocation."""
    command: Literal["tor", "ss", "massey", "check", "polytope"]
    inputs: List[str] = Field(default_factory=list)
    left: Optional[str] = None
    right: Optional[str] = None
    format: Literal["grid", "csv", "json"] = "grid"
    pattern: Optional[Path] = None
    target: Optional[str] = None
    engine: EngineConfig = Field(default_factory=EngineConfig)

    @model_validator(mode="after")
    def validate_operands(self):
        if self.command in ("tor", "ss") and (not self.left or not self.right):
            raise ValueError(f"{self.command} needs --left and --right")
        return self

    model_config = {"extra": "forbid"}


class ConfigParser:
    """Configuration loader for engine runs."""

    def __init__(self):
        """Initialize the configuration parser."""
        self.config: Optional[EngineConfig] = None

    def load_config(self, config_file: Optional[Path] = None) -> EngineConfig:
        """
        Load and validate engine settings from a YAML file.

        Args:
            config_file: Path to the YAML configuration file; a missing default
                file yields the built-in defaults.

        Returns:
            Validated configuration object
        """
        path = Path(config_file) if config_file else DEFAULT_CONFIG
        if not path.exists():
            if config_file:
                raise BadInputError(f"configuration file {path} not found")
            logger.debug("no configuration file, using defaults", path=str(path))
            self.config = EngineConfig()
            return self.config

        try:
            with open(path, "r") as f:
                raw = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise BadInputError(f"YAML parsing error in {path}: {e}") from e

        try:
            self.config = EngineConfig(**raw.get("engine", raw))
        except ValidationError as e:
            raise BadInputError(f"invalid configuration in {path}: {e}") from e

        logger.info(
            "Configuration loaded",
            path=str(path),
            precision=self.config.precision,
            window=self.config.window,
        )
        return self.config

    def merge(self, overrides: Dict[str, Any]) -> EngineConfig:
        """Apply non-None overrides (typically command-line flags)."""
        base = self.config or EngineConfig()
        data = base.model_dump()
        for key, value in overrides.items():
            if value is None:
                continue
            if key in ("level", "json_logs"):
                data["logging"][key] = value
            else:
                data[key] = value
        try:
            self.config = EngineConfig(**data)
        except ValidationError as e:
            raise BadInputError(f"invalid settings: {e}") from e
        return self.config


def golden_dir() -> Path:
    """Directory of golden tables and shipped patterns."""
    return Path(os.environ.get(GOLDEN_ENV, DEFAULT_GOLDEN))
