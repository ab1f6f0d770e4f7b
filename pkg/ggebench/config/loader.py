"""Configuration loader utilities."""

from pathlib import Path
from typing import Any

import yaml
from pydantic import ValidationError

from ggebench.config.schema import Experiment
from ggebench.core.errors import ConfigError
from ggebench.core.fs import atomic_write


def load_yaml(path: Path) -> dict[str, Any]:
    """Load YAML configuration file."""
    if not path.exists():
        raise FileNotFoundError(f"Configuration file not found: {path.as_posix()}")

    with open(path) as f:
        data = yaml.safe_load(f) or {}
    if not isinstance(data, dict):
        raise ConfigError(f"Configuration root must be a mapping: {path.as_posix()}")
    return data


def validation_messages(error: ValidationError) -> list[str]:
    """Flatten pydantic errors to ``location: message`` strings."""
    messages = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"]) or "config"
        messages.append(f"{location}: {item['msg']}")
    return messages


def parse_experiment(data: dict[str, Any]) -> Experiment:
    try:
        return Experiment.model_validate(data)
    except ValidationError as e:
        raise ConfigError("Invalid configuration", validation_messages(e)) from e


def load_experiment(config_path: Path | str | None) -> Experiment:
    """Load and validate experiment configuration; defaults when no path is given."""
    if config_path is None:
        return Experiment()
    if isinstance(config_path, str):
        config_path = Path(config_path)
    return parse_experiment(load_yaml(config_path))


def dump_experiment(experiment: Experiment) -> str:
    data = experiment.model_dump(mode="json")
    return yaml.safe_dump(data, default_flow_style=False, sort_keys=False)


def save_experiment(experiment: Experiment, path: Path):
    """Save experiment configuration to YAML."""
    atomic_write(path, dump_experiment(experiment))
