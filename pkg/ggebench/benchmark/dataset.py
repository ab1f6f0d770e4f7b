"""Dataset container, priors summary, grounding inversion and persistence."""

import json
from collections.abc import Iterator
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Literal

import numpy as np

from ggebench.core.errors import ParseError, ShapeError
from ggebench.core.fs import atomic_write, text_digest
from ggebench.models.instance import Batch, Instance

Split = Literal["train", "test_ood", "test_id"]

FORMAT_NAME = "ggebench-dataset"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class DatasetMeta:
    """Split tag plus an echo of the generator configuration."""

    split: str
    num_types: int
    config: dict[str, Any] = field(default_factory=dict)

    @property
    def config_digest(self) -> str:
        return text_digest(json.dumps(self.config, sort_keys=True))


@dataclass(frozen=True)
class Dataset:
    """Column-stored instances of one split.

    ``cues`` holds the answer id whose cue was placed in each context
    (-1 when unknown).
    """

    evidence: np.ndarray  # (N, n_v, d_v)
    context: np.ndarray  # (N, d_q)
    type_ids: np.ndarray  # (N,)
    labels: np.ndarray  # (N, C)
    masks: np.ndarray  # (N, n_v)
    meta: DatasetMeta
    cues: np.ndarray | None = None

    def __post_init__(self):
        n = self.evidence.shape[0]
        if self.evidence.ndim != 3:
            raise ShapeError("evidence", "(N, n_v, d_v)", self.evidence.shape)
        if self.context.ndim != 2 or self.labels.ndim != 2:
            found = (self.context.shape, self.labels.shape)
            raise ShapeError("context/labels", "2-D arrays", found)
        expected = {
            "context": (n, self.context.shape[1]),
            "type_ids": (n,),
            "labels": (n, self.labels.shape[-1]),
            "masks": (n, self.evidence.shape[1]),
        }
        for name, shape in expected.items():
            if getattr(self, name).shape != shape:
                raise ShapeError(f"dataset {name}", shape, getattr(self, name).shape)
        if n and (self.type_ids.min() < 0 or self.type_ids.max() >= self.meta.num_types):
            raise ShapeError("type_ids", f"[0, {self.meta.num_types})", "out of range")
        if np.any(self.labels < 0) or np.any(self.labels > 1):
            raise ValueError("label entries must lie in [0, 1]")
        if self.cues is None:
            object.__setattr__(self, "cues", np.full(n, -1, dtype=np.int64))

    def __len__(self) -> int:
        return int(self.evidence.shape[0])

    def __getitem__(self, index: int) -> Instance:
        return Instance(
            evidence=self.evidence[index],
            context=self.context[index],
            type_id=int(self.type_ids[index]),
            label=self.labels[index],
            grounding_mask=self.masks[index],
        )

    def __iter__(self) -> Iterator[Instance]:
        return (self[i] for i in range(len(self)))

    @property
    def num_classes(self) -> int:
        return int(self.labels.shape[1])

    @property
    def num_types(self) -> int:
        return self.meta.num_types

    @property
    def n_regions(self) -> int:
        return int(self.evidence.shape[1])

    @property
    def evidence_dim(self) -> int:
        return int(self.evidence.shape[2])

    @property
    def context_dim(self) -> int:
        return int(self.context.shape[1])

    @property
    def answers(self) -> np.ndarray:
        """Highest-scoring label per instance."""
        return np.argmax(self.labels, axis=1)

    def batch(self, indices: np.ndarray | slice | None = None) -> Batch:
        if indices is None:
            indices = slice(None)
        return Batch(
            evidence=self.evidence[indices],
            context=self.context[indices],
            type_ids=self.type_ids[indices],
            labels=self.labels[indices],
            masks=self.masks[indices],
        )

    def equals(self, other: "Dataset") -> bool:
        arrays = ("evidence", "context", "type_ids", "labels", "masks", "cues")
        return self.meta == other.meta and all(
            np.array_equal(getattr(self, name), getattr(other, name)) for name in arrays
        )


def accumulate_label_mass(type_ids: np.ndarray, labels: np.ndarray, num_types: int) -> np.ndarray:
    """Per-type sum of (soft) label vectors, shape (T, C)."""
    mass = np.zeros((num_types, labels.shape[1]))
    np.add.at(mass, type_ids, labels)
    return mass


def summarize_priors(data: Dataset) -> np.ndarray:
    """Empirical per-type answer distribution; rows of absent types stay zero."""
    if len(data) == 0:
        raise ValueError("Cannot summarise an empty dataset")
    mass = accumulate_label_mass(data.type_ids, data.labels, data.num_types)
    totals = mass.sum(axis=1, keepdims=True)
    return np.divide(mass, totals, out=np.zeros_like(mass), where=totals > 0)


def invert_grounding(data: Dataset) -> Dataset:
    """Replace every grounding score s by 1 - s."""
    if np.any(data.masks < 0) or np.any(data.masks > 1):
        raise ValueError("grounding scores must lie in [0, 1]")
    return replace(data, masks=1.0 - data.masks)


def _header(data: Dataset) -> dict[str, Any]:
    return {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "split": data.meta.split,
        "count": len(data),
        "n_regions": data.n_regions,
        "evidence_dim": data.evidence_dim,
        "context_dim": data.context_dim,
        "num_classes": data.num_classes,
        "num_types": data.num_types,
        "config": data.meta.config,
        "config_digest": data.meta.config_digest,
    }


def dumps_dataset(data: Dataset) -> str:
    assert data.cues is not None
    lines = [json.dumps(_header(data))]
    for i in range(len(data)):
        support = np.flatnonzero(data.labels[i])
        record = {
            "type_id": int(data.type_ids[i]),
            "label": [[int(j), float(data.labels[i, j])] for j in support],
            "evidence": [float(v) for v in data.evidence[i].ravel()],
            "context": [float(v) for v in data.context[i]],
            "mask": [float(v) for v in data.masks[i]],
            "cue": int(data.cues[i]),
        }
        lines.append(json.dumps(record))
    return "\n".join(lines) + "\n"


def save_dataset(data: Dataset, path: Path) -> None:
    atomic_write(path, dumps_dataset(data))


def _parse_header(path: str, line: str) -> dict[str, Any]:
    try:
        header = json.loads(line)
    except json.JSONDecodeError as e:
        raise ParseError(path, 1, f"header is not JSON: {e}") from e
    if not isinstance(header, dict) or header.get("format") != FORMAT_NAME:
        raise ParseError(path, 1, f"not a {FORMAT_NAME} file")
    required = ("count", "n_regions", "evidence_dim", "context_dim", "num_classes", "num_types")
    missing = [key for key in required if key not in header]
    if missing:
        raise ParseError(path, 1, f"header missing {', '.join(missing)}")
    return header


def load_dataset(path: Path) -> Dataset:
    """Load a dataset file; malformed records raise ``ParseError`` with the line number."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Dataset not found: {path.as_posix()}")
    name = path.as_posix()

    with open(path) as f:
        lines = f.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ParseError(name, 1, "empty file")

    header = _parse_header(name, lines[0])
    n, n_v = int(header["count"]), int(header["n_regions"])
    d_v, d_q = int(header["evidence_dim"]), int(header["context_dim"])
    C = int(header["num_classes"])

    evidence = np.zeros((n, n_v, d_v))
    context = np.zeros((n, d_q))
    type_ids = np.zeros(n, dtype=np.int64)
    labels = np.zeros((n, C))
    masks = np.zeros((n, n_v))
    cues = np.full(n, -1, dtype=np.int64)

    records = lines[1:]
    if len(records) > n:
        raise ParseError(name, n + 2, f"more records than the declared count {n}")
    for i, line in enumerate(records):
        line_no = i + 2
        try:
            record = json.loads(line)
            type_ids[i] = int(record["type_id"])
            for j, score in record["label"]:
                if int(j) < 0:
                    raise IndexError(f"label index {j} is negative")
                labels[i, int(j)] = float(score)
            evidence[i] = np.asarray(record["evidence"], dtype=np.float64).reshape(n_v, d_v)
            context[i] = np.asarray(record["context"], dtype=np.float64).reshape(d_q)
            masks[i] = np.asarray(record["mask"], dtype=np.float64).reshape(n_v)
            cues[i] = int(record.get("cue", -1))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError, IndexError) as e:
            raise ParseError(name, line_no, f"malformed record: {e}") from e
    if len(records) < n:
        raise ParseError(
            name, len(records) + 2, f"truncated: {len(records)} of {n} records present"
        )

    meta = DatasetMeta(
        split=str(header.get("split", "unknown")),
        num_types=int(header["num_types"]),
        config=dict(header.get("config", {})),
    )
    return Dataset(evidence, context, type_ids, labels, masks, meta, cues)
