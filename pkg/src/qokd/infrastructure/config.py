"""
Experiment configuration files.

A config file is TOML with one `key = value` line per ExperimentConfig
field. Keys may also sit under an `[experiment]` table. Command-line flags
override whatever the file sets.
"""

import logging
import sys
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from qokd.core.exceptions import ConfigurationError
from qokd.core.limits import check_symlink
from qokd.domain.entities import ExperimentConfig

__all__ = ["load_config_mapping", "load_experiment_config"]

logger = logging.getLogger(__name__)


def load_config_mapping(path: str | Path) -> dict[str, Any]:
    """
    Read a config file into a flat mapping.

    Raises:
        ConfigurationError: If the file is missing or not valid TOML
    """
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"Config file not found: {path}", config_key="config")
    _, resolved = check_symlink(path)
    try:
        with open(resolved, "rb") as f:
            data = tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        raise ConfigurationError(f"Invalid config file {path}: {e}", config_key="config") from e

    if "experiment" in data and isinstance(data["experiment"], dict):
        nested = data.pop("experiment")
        data = {**data, **nested}
    logger.debug("loaded %d config keys from %s", len(data), path)
    return data


def load_experiment_config(
    experiment: str,
    path: str | Path | None = None,
    **overrides: Any,
) -> ExperimentConfig:
    """
    Build the config for one experiment: file values, then non-None flags.

    Raises:
        ConfigurationError: On unknown keys or a file naming another experiment
    """
    data = load_config_mapping(path) if path is not None else {}
    named = data.get("experiment", experiment)
    if named != experiment:
        raise ConfigurationError(
            f"Config file is for '{named}', not '{experiment}'",
            config_key="experiment",
        )
    data["experiment"] = experiment
    return ExperimentConfig.from_mapping(data).with_overrides(**overrides)
