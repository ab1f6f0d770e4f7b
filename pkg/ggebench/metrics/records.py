"""Per-instance prediction records and their JSON-lines attribution dump."""

from collections.abc import Iterable
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from ggebench.core.errors import EvaluationError, ParseError
from ggebench.core.fs import iter_jsonl, write_jsonl

ATTENTION_TOLERANCE = 1e-6


@dataclass(frozen=True)
class PredictionRecord:
    """One evaluated instance: predicted answer, its soft score, attention and mask."""

    pred_index: int
    score: float
    attention: np.ndarray
    mask: np.ndarray
    type_id: int = 0

    def __post_init__(self):
        object.__setattr__(self, "attention", np.asarray(self.attention, dtype=np.float64))
        object.__setattr__(self, "mask", np.asarray(self.mask, dtype=np.float64))
        if not 0.0 <= self.score <= 1.0:
            raise EvaluationError(f"score must lie in [0, 1], got {self.score}")
        if self.attention.shape != self.mask.shape:
            raise EvaluationError(
                "attention and mask lengths differ",
                {"attention": self.attention.shape, "mask": self.mask.shape},
            )
        total = float(self.attention.sum())
        if abs(total - 1.0) > ATTENTION_TOLERANCE or np.any(self.attention < 0):
            raise EvaluationError(f"attention must be a distribution (sum {total})")

    @property
    def right(self) -> bool:
        return self.score > 0.0

    @property
    def gradable(self) -> bool:
        return bool(np.any(self.mask >= 0.5))

    def to_dict(self) -> dict[str, Any]:
        return {
            "pred_index": int(self.pred_index),
            "score": float(self.score),
            "type_id": int(self.type_id),
            "attention": [float(a) for a in self.attention],
            "mask": [float(m) for m in self.mask],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "PredictionRecord":
        return cls(
            pred_index=int(data["pred_index"]),
            score=float(data["score"]),
            attention=np.asarray(data["attention"], dtype=np.float64),
            mask=np.asarray(data["mask"], dtype=np.float64),
            type_id=int(data.get("type_id", 0)),
        )


def dump_predictions(records: Iterable[PredictionRecord], path: Path) -> None:
    write_jsonl(path, (record.to_dict() for record in records))


def load_predictions(path: Path) -> list[PredictionRecord]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Predictions file not found: {path.as_posix()}")
    records = []
    for line_no, data in iter_jsonl(path, "prediction record"):
        try:
            records.append(PredictionRecord.from_dict(data))
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError(path.as_posix(), line_no, f"bad prediction record: {e}") from e
        except EvaluationError as e:
            raise ParseError(path.as_posix(), line_no, str(e)) from e
    return records
