"""Core utilities shared across ggebench."""

from .artifacts import RunArtifacts
from .errors import (
    ArchitectureError,
    CacheError,
    ConfigError,
    DatasetError,
    EvaluationError,
    GGEBenchError,
    NumericError,
    ParseError,
    ShapeError,
    TrainingError,
)
from .fs import (
    atomic_write,
    dumps_jsonl,
    ensure_dir,
    file_digest,
    iter_jsonl,
    text_digest,
    write_jsonl,
)
from .logging import log_step, log_to_file, setup_logging
from .rng import derive_seed, stream

__all__ = [
    "RunArtifacts",
    "GGEBenchError",
    "ArchitectureError",
    "CacheError",
    "ConfigError",
    "DatasetError",
    "EvaluationError",
    "NumericError",
    "ParseError",
    "ShapeError",
    "TrainingError",
    "atomic_write",
    "ensure_dir",
    "file_digest",
    "dumps_jsonl",
    "write_jsonl",
    "iter_jsonl",
    "text_digest",
    "log_step",
    "log_to_file",
    "setup_logging",
    "derive_seed",
    "stream",
]
