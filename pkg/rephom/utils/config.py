"""Configuration utilities.

This module loads the YAML defaults under ``config/``, reads the environment
(after loading a ``.env`` file) into a validated ``Settings`` object, and sets
up logging for the command line.
"""

import logging
import os
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError, validator

from rephom.core.errors import InputError

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parents[2] / "config" / "rephom.yaml"
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

_LEVELS = ("CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG")


class Settings(BaseModel):
    """
    Process-wide settings read from the environment.

    Attributes:
        threads (int): worker cap for block-parallel rank computations
        config_path (Path): YAML file with the engine defaults
        log_level (str): root logging level
    """

    threads: int = Field(1, ge=1)
    config_path: Path = DEFAULT_CONFIG_PATH
    log_level: str = "WARNING"

    @validator("log_level")
    def _known_level(cls, value: str) -> str:
        level = value.upper()
        if level not in _LEVELS:
            raise ValueError(f"unknown log level {value!r}")
        return level


def load_config(config_path) -> Dict[str, Any]:
    """Load YAML configuration file."""
    try:
        with open(config_path, "r") as file:
            config = yaml.safe_load(file)
    except FileNotFoundError as exc:
        raise InputError(f"configuration file not found: {config_path}") from exc
    except yaml.YAMLError as exc:
        raise InputError(f"configuration file {config_path} is not valid YAML: {exc}") from exc
    return config or {}


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """
    Read settings from the environment.

    Returns:
        Settings: validated settings

    Raises:
        InputError: if an environment variable holds an invalid value
    """
    load_dotenv()
    raw = {
        "threads": os.getenv("REPHOM_THREADS", "1"),
        "config_path": os.getenv("REPHOM_CONFIG", str(DEFAULT_CONFIG_PATH)),
        "log_level": os.getenv("REPHOM_LOG_LEVEL", "WARNING"),
    }
    try:
        return Settings(**raw)
    except ValidationError as exc:
        raise InputError(f"invalid environment settings: {exc}") from exc


def get_config(settings: Optional[Settings] = None) -> Dict[str, Any]:
    """Return the YAML defaults named by the settings."""
    settings = settings or get_settings()
    return load_config(settings.config_path)


def setup_logging(level: Optional[str] = None) -> None:
    """Configure the root logger once; later calls only adjust the level."""
    level = (level or get_settings().log_level).upper()
    root = logging.getLogger()
    if not root.handlers:
        logging.basicConfig(level=level, format=LOG_FORMAT)
    root.setLevel(level)
