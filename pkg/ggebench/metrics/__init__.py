"""Soft accuracy and grounding-faithfulness metrics."""

from .grounding import (
    PAIRED_CAPS,
    MetricsReport,
    cap_for_threshold,
    cgr_cgw_cgd,
    grounding_hit,
    sensitive_set,
    soft_accuracy,
    sweep_table,
    sweep_thresholds,
)
from .records import PredictionRecord, dump_predictions, load_predictions

__all__ = [
    "PAIRED_CAPS",
    "MetricsReport",
    "PredictionRecord",
    "cap_for_threshold",
    "cgr_cgw_cgd",
    "dump_predictions",
    "grounding_hit",
    "load_predictions",
    "sensitive_set",
    "soft_accuracy",
    "sweep_table",
    "sweep_thresholds",
]
