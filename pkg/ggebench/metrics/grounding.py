"""Soft accuracy and grounding-faithfulness metrics (CGR, CGW, CGD)."""

import math
from collections.abc import Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field

from ggebench.core.errors import EvaluationError
from ggebench.metrics.records import PredictionRecord

# Sensitive-set cap paired with each standard attention threshold.
PAIRED_CAPS: dict[float, int] = {0.1: 9, 0.2: 4, 0.3: 3, 0.4: 2}
DEFAULT_THRESHOLD = 0.2


def cap_for_threshold(t: float) -> int:
    for threshold, cap in PAIRED_CAPS.items():
        if math.isclose(t, threshold, abs_tol=1e-12):
            return cap
    return max(1, math.floor(0.9 / t + 1e-9))


def sensitive_set(attention: np.ndarray, t: float, cap: int) -> np.ndarray:
    """Regions with attention >= t, highest first, at most ``cap`` of them."""
    attention = np.asarray(attention, dtype=np.float64)
    candidates = np.flatnonzero(attention >= t)
    order = np.argsort(-attention[candidates], kind="stable")
    return candidates[order][:cap]


def grounding_hit(
    attention: np.ndarray,
    mask: np.ndarray,
    t: float = DEFAULT_THRESHOLD,
    cap: int | None = None,
    strict: bool = False,
) -> bool:
    """Whether the ground-truth regions fall inside the sensitive set.

    Any overlap counts by default; ``strict`` requires every ground-truth region.
    """
    if not 0.0 < t < 1.0:
        raise EvaluationError(f"threshold must lie in (0, 1), got {t}")
    cap = cap_for_threshold(t) if cap is None else cap
    if cap < 1:
        raise EvaluationError(f"cap must be >= 1, got {cap}")
    truth = set(np.flatnonzero(np.asarray(mask) >= 0.5).tolist())
    if not truth:
        return False
    chosen = set(sensitive_set(attention, t, cap).tolist())
    return truth <= chosen if strict else bool(truth & chosen)


def soft_accuracy(records: Sequence[PredictionRecord]) -> tuple[float, dict[int, float]]:
    """Mean score overall and per type."""
    if not records:
        raise EvaluationError("Cannot compute accuracy of zero records")
    scores = np.asarray([r.score for r in records])
    types = np.asarray([r.type_id for r in records])
    per_type = {int(t): float(scores[types == t].mean()) for t in np.unique(types)}
    return float(scores.mean()), per_type


class MetricsReport(BaseModel):
    """Accuracy plus CGR/CGW/CGD at one threshold.

    Accuracies are fractions in [0, 1]; CGR, CGW and CGD are percentages.
    A ratio with a zero denominator is reported as 0 and flagged.
    """

    accuracy: float
    per_type_accuracy: dict[int, float] = Field(default_factory=dict)
    cgr: float
    cgw: float
    cgd: float
    n_rp: int
    n_wp: int
    n_rg_rp: int
    n_rg_wp: int
    threshold: float
    cap: int
    strict: bool = False
    n_records: int
    cgr_undefined: bool = False
    cgw_undefined: bool = False

    @property
    def n_gradable(self) -> int:
        return self.n_rp + self.n_wp

    def to_row(self) -> dict[str, float | int | bool]:
        """Flat row for CSV output; per-type accuracies become ``acc_type_<t>`` columns."""
        row = self.model_dump(exclude={"per_type_accuracy"})
        for t, value in sorted(self.per_type_accuracy.items()):
            row[f"acc_type_{t}"] = value
        return row

    @classmethod
    def from_row(cls, row: dict) -> "MetricsReport":
        row = {k: (v.item() if hasattr(v, "item") else v) for k, v in row.items()}
        data = {k: v for k, v in row.items() if not str(k).startswith("acc_type_")}
        per_type = {
            int(str(k)[len("acc_type_") :]): float(v)
            for k, v in row.items()
            if str(k).startswith("acc_type_") and not pd.isna(v)
        }
        return cls(**data, per_type_accuracy=per_type)


def _ratio(numerator: int, denominator: int) -> float:
    return 100.0 * numerator / denominator if denominator else 0.0


def cgr_cgw_cgd(
    records: Sequence[PredictionRecord],
    t: float = DEFAULT_THRESHOLD,
    cap: int | None = None,
    strict: bool = False,
) -> MetricsReport:
    """Grounding counts over gradable records; a right prediction has score > 0."""
    accuracy, per_type = soft_accuracy(records)
    cap = cap_for_threshold(t) if cap is None else cap

    n_rp = n_wp = n_rg_rp = n_rg_wp = 0
    for record in records:
        if not record.gradable:
            continue
        hit = grounding_hit(record.attention, record.mask, t, cap, strict)
        if record.right:
            n_rp += 1
            n_rg_rp += hit
        else:
            n_wp += 1
            n_rg_wp += hit

    cgr, cgw = _ratio(n_rg_rp, n_rp), _ratio(n_rg_wp, n_wp)
    return MetricsReport(
        accuracy=accuracy,
        per_type_accuracy=per_type,
        cgr=cgr,
        cgw=cgw,
        cgd=cgr - cgw,
        n_rp=n_rp,
        n_wp=n_wp,
        n_rg_rp=n_rg_rp,
        n_rg_wp=n_rg_wp,
        threshold=t,
        cap=cap,
        strict=strict,
        n_records=len(records),
        cgr_undefined=n_rp == 0,
        cgw_undefined=n_wp == 0,
    )


def sweep_thresholds(
    records: Sequence[PredictionRecord],
    thresholds: Sequence[float] = (0.1, 0.2, 0.3, 0.4),
    strict: bool = False,
) -> list[MetricsReport]:
    """One report per threshold, each with its paired cap."""
    for t in thresholds:
        if not 0.0 < t < 1.0:
            raise EvaluationError(f"threshold must lie in (0, 1), got {t}")
    return [cgr_cgw_cgd(records, t, None, strict) for t in thresholds]


def sweep_table(reports: Sequence[MetricsReport]) -> pd.DataFrame:
    columns = ["threshold", "cap", "cgr", "cgw", "cgd"]
    return pd.DataFrame([{c: getattr(r, c) for c in columns} for r in reports], columns=columns)
