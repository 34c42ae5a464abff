"""
Configuration files

A config file is a JSON object whose keys mirror the command line flags
(``--max-rounds`` may be written ``max-rounds`` or ``max_rounds``). A run
manifest written by the harness is accepted as well; its ``config`` section is
used, so any experiment can be re-run from its manifest.
"""

import json
import logging
from dataclasses import fields
from pathlib import Path
from typing import Any, Dict, Iterable, Union

from .errors import ConfigError

logger = logging.getLogger(__name__)


def normalize_keys(values: Dict[str, Any]) -> Dict[str, Any]:
    """Map flag-style keys (dashes) to attribute names (underscores)"""
    return {str(key).replace("-", "_"): value for key, value in values.items()}


def load_config(path: Union[str, Path]) -> Dict[str, Any]:
    """
    Read a JSON config file or run manifest

    Args:
        path: File to read

    Returns:
        dict: Normalized settings

    Raises:
        ConfigError: If the file is missing, not JSON, or not an object
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}", path=str(path))
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file is not valid JSON: {e}", path=str(path))
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object", path=str(path))
    if "config" in data and "master_seed" in data:
        logger.info("using the config section of manifest %s", path)
        data = data["config"]
    return normalize_keys(data)


def check_known(values: Dict[str, Any], allowed: Iterable[str], where: str) -> None:
    """
    Reject keys that do not correspond to a known setting

    Raises:
        ConfigError: Listing the unknown keys
    """
    unknown = sorted(set(values) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown settings for {where}: {', '.join(unknown)}", unknown=unknown)


def build_dataclass(cls, values: Dict[str, Any]):
    """
    Instantiate a settings dataclass from a mapping

    Raises:
        ConfigError: On unknown keys
    """
    values = normalize_keys(values)
    check_known(values, (f.name for f in fields(cls)), cls.__name__)
    return cls(**values)
