"""Bias sources, ensemble composition and the training schedules."""

from .bias import (
    DistributionBiasTable,
    compose_ensemble,
    distribution_bias_from_labels,
    fit_distribution_bias,
    pseudo_targets,
)
from .inverse import inverse_supervision_round
from .state import Branch, EnsembleState, RunRecord, branch_names, build_state
from .trainer import (
    PLANS,
    train,
    train_rubi,
    train_step_inverse,
    train_step_iter,
    train_step_rubi,
    train_step_sum_dq,
    train_step_tog,
    train_sum_dq,
)

__all__ = [
    "DistributionBiasTable",
    "compose_ensemble",
    "distribution_bias_from_labels",
    "fit_distribution_bias",
    "pseudo_targets",
    "inverse_supervision_round",
    "Branch",
    "EnsembleState",
    "RunRecord",
    "branch_names",
    "build_state",
    "PLANS",
    "train",
    "train_rubi",
    "train_sum_dq",
    "train_step_iter",
    "train_step_tog",
    "train_step_sum_dq",
    "train_step_rubi",
    "train_step_inverse",
]
