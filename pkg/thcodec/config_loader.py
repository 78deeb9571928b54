"""Cached access to ``config.yaml`` and path resolution for configured locations."""
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml

from thcodec.exceptions import ConfigError

PROJECT_ROOT = Path(__file__).resolve().parents[1]
CONFIG_PATH = PROJECT_ROOT / "config.yaml"


@lru_cache(maxsize=4)
def _load_config(path: Optional[Path] = None) -> Dict[str, Any]:
    config_path = path or CONFIG_PATH
    if not config_path.exists():
        raise ConfigError(f"Config file not found at {config_path}")
    try:
        with config_path.open("r", encoding="utf-8") as fp:
            config = yaml.safe_load(fp) or {}
    except yaml.YAMLError as e:
        raise ConfigError(f"{config_path.name} is not valid YAML: {e}") from e
    if not isinstance(config, dict):
        raise ConfigError(f"{config_path.name} must be a mapping of sections")
    return config


def get_config(section: Optional[str] = None, path: Optional[Path] = None) -> Dict[str, Any]:
    """The whole config, or a fresh copy of one section (empty when absent)."""
    config = _load_config(path)
    if section:
        return dict(config.get(section) or {})
    return config


def resolve_path(
    path_value: Optional[Union[str, Path]],
    fallback: Optional[Path] = None,
    root: Path = PROJECT_ROOT,
) -> Optional[Path]:
    """Relative values resolve against ``root``; empty values give ``fallback``."""
    if not path_value:
        return fallback
    path = Path(path_value)
    return path if path.is_absolute() else root / path
