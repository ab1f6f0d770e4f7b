"""Shared fixtures: a tiny benchmark and matching model dimensions."""

from pathlib import Path

import numpy as np
import pytest
import yaml

from ggebench.benchmark.generator import generate
from ggebench.config.schema import GeneratorConfig, ModelConfig, TrainingConfig
from ggebench.ensemble.trainer import model_config_for

REPO_ROOT = Path(__file__).resolve().parent.parent


def tiny_generator(**overrides) -> GeneratorConfig:
    values = dict(
        num_classes=4,
        num_types=2,
        n_regions=3,
        evidence_dim=4,
        context_dim=4,
        n_train=64,
        n_test=32,
        head_mass=0.7,
        shortcut_rate=0.8,
        noise_sigma=0.4,
        type_affinity=0.0,
        seed=0,
    )
    values.update(overrides)
    return GeneratorConfig(**values)


def tiny_experiment_dict(tmp_path: Path, **training) -> dict:
    """Experiment mapping for CLI and pipeline tests; all paths under ``tmp_path``."""
    gen = tiny_generator().model_dump(mode="json")
    return {
        "generator": gen,
        "model": {
            "n_regions": gen["n_regions"],
            "evidence_dim": gen["evidence_dim"],
            "context_dim": gen["context_dim"],
            "hidden_dim": 8,
            "num_classes": gen["num_classes"],
        },
        "training": {"variant": "baseline", "epochs": 2, "batch_size": 16, "lr": 0.01, **training},
        "evaluation": {"threshold": 0.2},
        "ablation": {"variants": ["baseline", "gge-dq-iter"], "seeds": 1, "jobs": 1},
        "paths": {
            "data_dir": (tmp_path / "data").as_posix(),
            "runs_dir": (tmp_path / "runs").as_posix(),
            "reports_dir": (tmp_path / "reports").as_posix(),
        },
    }


@pytest.fixture(scope="session")
def tiny_splits():
    return generate(tiny_generator())


@pytest.fixture(scope="session")
def tiny_train(tiny_splits):
    return tiny_splits["train"]


@pytest.fixture(scope="session")
def tiny_model(tiny_train) -> ModelConfig:
    return model_config_for(tiny_train, hidden_dim=8)


@pytest.fixture
def tiny_batch(tiny_train):
    return tiny_train.batch(np.arange(16))


@pytest.fixture
def training_config():
    def make(**overrides) -> TrainingConfig:
        values = dict(epochs=2, batch_size=16, lr=0.01, seed=3)
        values.update(overrides)
        return TrainingConfig(**values)

    return make


@pytest.fixture
def experiment_file(tmp_path):
    def write(**training) -> Path:
        path = tmp_path / "experiment.yaml"
        path.write_text(yaml.safe_dump(tiny_experiment_dict(tmp_path, **training)))
        return path

    return write
