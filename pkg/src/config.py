"""
Configuration module for the Painleve toolkit.
Loads and validates configuration from YAML file.
"""

from __future__ import annotations

import copy
import os
import re
import yaml
import logging
from typing import Any

logger = logging.getLogger(__name__)

CONFIG_ENV_VAR = 'PAINLEVE_CONFIG'
LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR')

NUMERIC_DEFAULTS = {
    'rtol': 1e-10,
    'atol': 1e-12,
    'blowup_threshold': 1e8,
    'min_step': 1e-12,
    'max_steps': 200000,
    'fd_spacing': 1e-3,
    'residual_tolerance': 1e-4,
    'denominator_floor': 1e-8,
    'span': 0.2,
}


class ConfigError(Exception):
    """Configuration error exception."""
    pass


def expand_env_vars(value: Any) -> Any:
    """
    Recursively expand environment variables in configuration values.
    Supports ${VAR_NAME} syntax.
    """
    if isinstance(value, str):
        pattern = re.compile(r'\$\{([^}]+)\}')
        matches = pattern.findall(value)
        for match in matches:
            env_value = os.environ.get(match, '')
            value = value.replace(f'${{{match}}}', env_value)
        return value
    elif isinstance(value, dict):
        return {k: expand_env_vars(v) for k, v in value.items()}
    elif isinstance(value, list):
        return [expand_env_vars(item) for item in value]
    return value


def load_config(config_path: str = None) -> dict:
    """
    Load configuration from YAML file.

    Args:
        config_path: Path to config file. If None, uses PAINLEVE_CONFIG env var;
            when neither is set the defaults are returned.

    Returns:
        Configuration dictionary.

    Raises:
        ConfigError: If configuration is invalid or file not found.
    """
    if config_path is None:
        config_path = os.environ.get(CONFIG_ENV_VAR)

    if config_path is None:
        logger.debug("No configuration file given, using defaults")
        return get_default_config()

    if not os.path.exists(config_path):
        raise ConfigError(f"Configuration file not found: {config_path}")

    try:
        with open(config_path, 'r', encoding='utf-8') as f:
            config = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigError(f"Invalid YAML in configuration file: {e}")

    if config is None:
        config = {}
    if not isinstance(config, dict):
        raise ConfigError("Configuration file must contain a mapping")

    config = expand_env_vars(config)
    validate_config(config)

    logger.info(f"Configuration loaded from {config_path}")
    return config


def _section(config: dict, name: str) -> dict:
    section = config.setdefault(name, {})
    if section is None:
        section = config[name] = {}
    if not isinstance(section, dict):
        raise ConfigError(f"Section '{name}' must be a mapping")
    return section


def _positive_number(section: str, key: str, value: Any) -> float:
    if isinstance(value, bool):
        raise ConfigError(f"{section}.{key} must be a positive number, got {value!r}")
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{section}.{key} must be a positive number, got {value!r}")
    if not number > 0:
        raise ConfigError(f"{section}.{key} must be a positive number, got {value!r}")
    return number


def _positive_int(section: str, key: str, value: Any) -> int:
    if isinstance(value, bool):
        raise ConfigError(f"{section}.{key} must be a positive integer, got {value!r}")
    try:
        number = int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{section}.{key} must be a positive integer, got {value!r}")
    if number <= 0 or (isinstance(value, float) and not value.is_integer()):
        raise ConfigError(f"{section}.{key} must be a positive integer, got {value!r}")
    return number


def validate_config(config: dict) -> None:
    """
    Validate configuration dictionary and fill in defaults.

    Unknown top-level sections are kept as they are.

    Raises:
        ConfigError: If a known field is invalid.
    """
    if not isinstance(config, dict):
        raise ConfigError("Configuration must be a mapping")

    numeric = _section(config, 'numeric')
    unknown = set(numeric) - set(NUMERIC_DEFAULTS)
    if unknown:
        raise ConfigError(f"Unknown numeric settings: {', '.join(sorted(unknown))}")
    for key, default in NUMERIC_DEFAULTS.items():
        value = numeric.get(key, default)
        if key == 'max_steps':
            numeric[key] = _positive_int('numeric', key, value)
        else:
            numeric[key] = _positive_number('numeric', key, value)
    if numeric['rtol'] >= 1:
        raise ConfigError(f"numeric.rtol must be below 1, got {numeric['rtol']}")

    sweep = _section(config, 'sweep')
    sweep['concurrency'] = _positive_int('sweep', 'concurrency', sweep.get('concurrency', 4))

    logging_section = _section(config, 'logging')
    level = str(logging_section.get('level', 'INFO')).upper()
    if level not in LOG_LEVELS:
        raise ConfigError(
            f"Invalid logging.level: {level}. "
            f"Must be one of: {', '.join(LOG_LEVELS)}"
        )
    logging_section['level'] = level


def get_default_config() -> dict:
    """Return default configuration template."""
    return {
        'numeric': copy.deepcopy(NUMERIC_DEFAULTS),
        'sweep': {
            'concurrency': 4
        },
        'logging': {
            'level': 'INFO'
        }
    }
