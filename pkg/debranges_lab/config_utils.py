"""
Configuration utilities for the de Branges Spectral Laboratory.

System settings (config/config.yaml): output and log locations, logging,
integration defaults and verification tolerances. Experiment files are
handled by experiment_config.
"""

import os
import yaml
from typing import Dict, Any, Optional

from debranges_lab.errors import ConfigError

DEFAULT_CONFIG_PATH = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'config', 'config.yaml')

REQUIRED_SECTIONS = ('paths', 'logging', 'numerics', 'verification')
LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')

# Used when no settings file is available
FALLBACK_CONFIG: Dict[str, Any] = {
    'paths': {'output_dir': 'output', 'logs_dir': 'logs'},
    'logging': {'level': 'INFO', 'console': True, 'file': False},
    'numerics': {
        'rtol': 1e-10,
        'atol': 1e-12,
        'frobenius_max_terms': 200,
        'frobenius_retries': 8,
        'kernel_limit_step': 1e-4,
    },
    'verification': {
        'parseval': 1e-5,
        'kernel_duality': 1e-7,
        'nesting': 1e-5,
        'asymptotics': 1e-2,
        'reproducing': 1e-5,
    },
}


def load_config(config_path: Optional[str] = None) -> Dict[str, Any]:
    """
    Read the settings YAML.

    Args:
        config_path: Settings file; config/config.yaml when None.

    Returns:
        Settings dictionary.

    Raises:
        FileNotFoundError: If the file does not exist.
        ConfigError: If the file is not a YAML mapping.
    """
    path = config_path or DEFAULT_CONFIG_PATH
    if not os.path.isfile(path):
        raise FileNotFoundError(f"Settings file not found: {path}")

    with open(path, 'r') as f:
        try:
            settings = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigError(f"Cannot parse settings file {path}: {e}")

    if not isinstance(settings, dict):
        raise ConfigError(f"Settings file {path} must contain a mapping")
    return settings


def load_config_or_fallback(config_path: Optional[str] = None) -> Dict[str, Any]:
    """Like load_config, but a missing file yields FALLBACK_CONFIG."""
    try:
        return load_config(config_path)
    except FileNotFoundError:
        return FALLBACK_CONFIG


def get_config_value(config: Dict[str, Any], key_path: str, default: Any = None) -> Any:
    """
    Look up a dot-separated path such as 'numerics.rtol'.

    Returns `default` when any segment is missing.
    """
    node: Any = config
    for key in key_path.split('.'):
        if not isinstance(node, dict) or key not in node:
            return default
        node = node[key]
    return node


def _positive(config: Dict[str, Any], key_path: str) -> None:
    value = get_config_value(config, key_path)
    try:
        ok = value is not None and float(value) > 0
    except (TypeError, ValueError):
        ok = False
    if not ok:
        raise ConfigError(f"{key_path} must be a positive number, got {value!r}")


def validate_config(config: Dict[str, Any]) -> None:
    """
    Check the settings structure.

    Raises:
        ConfigError: On a missing section, an unknown logging level or a
            non-positive tolerance.
    """
    missing = [section for section in REQUIRED_SECTIONS if section not in config]
    if missing:
        raise ConfigError(f"Missing required configuration section(s): {', '.join(missing)}")

    level = get_config_value(config, 'logging.level')
    if level not in LOG_LEVELS:
        raise ConfigError(f"logging.level must be one of {', '.join(LOG_LEVELS)}, got {level!r}")

    _positive(config, 'numerics.rtol')
    _positive(config, 'numerics.atol')
    for key in config['verification'] or {}:
        _positive(config, f'verification.{key}')
