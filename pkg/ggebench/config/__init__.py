"""Configuration module for ggebench."""

from .loader import load_experiment, parse_experiment, save_experiment
from .schema import (
    AblationConfig,
    EvaluationConfig,
    Experiment,
    GeneratorConfig,
    ModelConfig,
    PathsConfig,
    TrainingConfig,
)

__all__ = [
    "Experiment",
    "GeneratorConfig",
    "ModelConfig",
    "TrainingConfig",
    "EvaluationConfig",
    "AblationConfig",
    "PathsConfig",
    "load_experiment",
    "parse_experiment",
    "save_experiment",
]
