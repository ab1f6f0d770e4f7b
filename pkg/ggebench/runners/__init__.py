"""Evaluation and ablation runners."""

from .ablation import AblationRunner, parse_label
from .evaluator import base_network_for, evaluate, predict, sweep

__all__ = ["AblationRunner", "parse_label", "base_network_for", "evaluate", "predict", "sweep"]
