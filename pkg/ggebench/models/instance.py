"""Instance and batch containers shared by the models and the benchmark."""

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from ggebench.core.errors import ShapeError


@dataclass(frozen=True)
class Instance:
    """One sample: region matrix, context vector, type, soft label, grounding mask."""

    evidence: np.ndarray  # (n_v, d_v)
    context: np.ndarray  # (d_q,)
    type_id: int
    label: np.ndarray  # (C,) in [0, 1]
    grounding_mask: np.ndarray  # (n_v,) in [0, 1]

    def __post_init__(self):
        if self.evidence.ndim != 2:
            raise ShapeError("evidence", "(n_v, d_v)", self.evidence.shape)
        if self.grounding_mask.shape != (self.evidence.shape[0],):
            raise ShapeError("grounding_mask", (self.evidence.shape[0],), self.grounding_mask.shape)
        if np.any(self.label < 0) or np.any(self.label > 1):
            raise ValueError("label entries must lie in [0, 1]")

    @property
    def gradable(self) -> bool:
        return bool(np.any(self.grounding_mask >= 0.5))


@dataclass(frozen=True)
class Batch:
    """Stacked instances; every array carries the batch on axis 0."""

    evidence: np.ndarray  # (B, n_v, d_v)
    context: np.ndarray  # (B, d_q)
    type_ids: np.ndarray  # (B,)
    labels: np.ndarray  # (B, C)
    masks: np.ndarray  # (B, n_v)

    def __post_init__(self):
        size = self.evidence.shape[0]
        for name in ("context", "type_ids", "labels", "masks"):
            if getattr(self, name).shape[0] != size:
                raise ShapeError(f"batch {name}", size, getattr(self, name).shape[0])

    def __len__(self) -> int:
        return int(self.evidence.shape[0])

    @classmethod
    def from_instances(cls, instances: Sequence[Instance]) -> "Batch":
        if not instances:
            raise ValueError("Cannot build a batch from zero instances")
        return cls(
            evidence=np.stack([i.evidence for i in instances]).astype(np.float64),
            context=np.stack([i.context for i in instances]).astype(np.float64),
            type_ids=np.asarray([i.type_id for i in instances], dtype=np.int64),
            labels=np.stack([i.label for i in instances]).astype(np.float64),
            masks=np.stack([i.grounding_mask for i in instances]).astype(np.float64),
        )

    @classmethod
    def of(cls, instance: Instance) -> "Batch":
        return cls.from_instances([instance])
