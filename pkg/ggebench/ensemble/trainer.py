"""Greedy gradient ensemble training: step functions and the epoch loop."""

import logging
import time
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from ggebench.benchmark.dataset import Dataset
from ggebench.config.schema import ModelConfig, TrainingConfig
from ggebench.core.errors import NumericError, ShapeError, TrainingError
from ggebench.core.rng import stream
from ggebench.ensemble.bias import (
    ENSEMBLE_COMPONENTS,
    DistributionBiasTable,
    compose_ensemble,
    fit_distribution_bias,
    pseudo_targets,
)
from ggebench.ensemble.inverse import inverse_supervision_round, non_empty
from ggebench.ensemble.state import (
    EnsembleState,
    RunRecord,
    build_state,
    uses_distribution_bias,
)
from ggebench.losses.classification import loss, loss_grad_wrt_logits, probabilities
from ggebench.models.instance import Batch
from ggebench.models.networks import BaseForward, Forward, LinearHead
from ggebench.nn.layers import sigmoid
from ggebench.nn.optim import adamax_step
from ggebench.nn.params import ParamGrads

logger = logging.getLogger(__name__)

StepFn = Callable[[EnsembleState, Batch], EnsembleState]


@dataclass(frozen=True)
class StagePlan:
    """Which biased branch precedes the base model and which ensembles set the targets.

    A target of ``None`` means the ground-truth labels.
    """

    biased_branch: str | None = None
    biased_target: str | None = None
    base_target: str | None = None


PLANS: dict[str, StagePlan] = {
    "baseline": StagePlan(),
    "vision-only": StagePlan(),
    "gge-d": StagePlan(base_target="gge-d"),
    "gge-q": StagePlan("shortcut", None, "gge-q"),
    "gge-dq": StagePlan("shortcut", "gge-d", "gge-dq"),
    "gge-sf": StagePlan("self", None, "gge-sf"),
    "gge-d-sf": StagePlan("self", "gge-d", "gge-d-sf"),
}


def _branch_forward(state: EnsembleState, name: str, batch: Batch, base: BaseForward) -> Forward:
    branch = state[name]
    if isinstance(branch.network, LinearHead):
        # heads read the (detached) joint representation of the base model
        return branch.network.forward(branch.params, base.joint_repr)
    return branch.network.forward(branch.params, batch)


def _checked(state: EnsembleState, record: str, value: float) -> float:
    if not np.isfinite(value):
        raise TrainingError(record, state.batch_index, f"non-finite loss ({value})")
    state.last_losses[record] = value
    return value


def _loss_and_grads(
    state: EnsembleState,
    name: str,
    forward: Forward,
    target: np.ndarray,
    sample_weights: np.ndarray | None = None,
    record: str | None = None,
) -> ParamGrads:
    family = state.config.loss_family
    _checked(state, record or name, loss(family, forward.logits, target, sample_weights))
    grad = loss_grad_wrt_logits(family, forward.logits, target, sample_weights)
    branch = state[name]
    return branch.network.backward(branch.params, forward.cache, grad)


def _apply(state: EnsembleState, name: str, grads: ParamGrads) -> None:
    branch = state[name]
    try:
        adamax_step(branch.optimizer, branch.params, grads)
    except NumericError as e:
        raise TrainingError(name, state.batch_index, str(e)) from e


def _target(
    state: EnsembleState, ensemble: str | None, batch: Batch, biased_logits: np.ndarray | None
) -> np.ndarray:
    if ensemble is None:
        return batch.labels
    needs_row, needs_logits = ENSEMBLE_COMPONENTS[ensemble]
    row = state.bias_rows(batch.type_ids) if needs_row else None
    H = compose_ensemble(
        ensemble, row, biased_logits if needs_logits else None, state.config.loss_family
    )
    return pseudo_targets(state.config.loss_family, batch.labels, H)


def train_step_iter(state: EnsembleState, batch: Batch) -> EnsembleState:
    """One batch of sequential updates.

    The biased branch is updated first; its output is then recomputed with the
    new parameters before the base model's pseudo-labels are taken.
    """
    special = SPECIAL_STEPS.get(state.config.variant)
    if special is not None:
        return special(state, batch)

    plan = PLANS[state.config.variant]
    base = state["base"]
    base_forward = base.network.forward(base.params, batch)

    biased_logits = None
    if plan.biased_branch is not None:
        name = plan.biased_branch
        forward = _branch_forward(state, name, batch, base_forward)
        target = _target(state, plan.biased_target, batch, None)
        _apply(state, name, _loss_and_grads(state, name, forward, target))
        biased_logits = _branch_forward(state, name, batch, base_forward).logits

    target = _target(state, plan.base_target, batch, biased_logits)
    _apply(state, "base", _loss_and_grads(state, "base", base_forward, target))
    return state


def train_step_tog(state: EnsembleState, batch: Batch) -> EnsembleState:
    """One joint step: every loss from the pre-update parameters, then all updates.

    Targets are plain arrays, so no gradient reaches the branches that produced them.
    """
    special = SPECIAL_STEPS.get(state.config.variant)
    if special is not None:
        return special(state, batch)

    plan = PLANS[state.config.variant]
    base = state["base"]
    base_forward = base.network.forward(base.params, batch)

    grads: dict[str, ParamGrads] = {}
    biased_logits = None
    if plan.biased_branch is not None:
        name = plan.biased_branch
        forward = _branch_forward(state, name, batch, base_forward)
        target = _target(state, plan.biased_target, batch, None)
        grads[name] = _loss_and_grads(state, name, forward, target)
        biased_logits = forward.logits

    target = _target(state, plan.base_target, batch, biased_logits)
    grads["base"] = _loss_and_grads(state, "base", base_forward, target)
    for name, branch_grads in grads.items():
        _apply(state, name, branch_grads)
    return state


def train_step_sum_dq(state: EnsembleState, batch: Batch) -> EnsembleState:
    """Single loss on the summed score B_d + s(B_q) + s(A)."""
    base, shortcut = state["base"], state["shortcut"]
    base_forward = base.network.forward(base.params, batch)
    shortcut_forward = shortcut.network.forward(shortcut.params, batch)

    s_q, s_a = sigmoid(shortcut_forward.logits), sigmoid(base_forward.logits)
    summed = state.bias_rows(batch.type_ids) + s_q + s_a
    family = state.config.loss_family
    _checked(state, "joint", loss(family, summed, batch.labels))
    grad = loss_grad_wrt_logits(family, summed, batch.labels)

    base_grads = base.network.backward(base.params, base_forward.cache, grad * s_a * (1.0 - s_a))
    shortcut_grads = shortcut.network.backward(
        shortcut.params, shortcut_forward.cache, grad * s_q * (1.0 - s_q)
    )
    _apply(state, "base", base_grads)
    _apply(state, "shortcut", shortcut_grads)
    return state


def train_step_rubi(state: EnsembleState, batch: Batch) -> EnsembleState:
    """L(A * s(G), y) + L(c(G), y); the mask G comes from the context or the joint repr."""
    base, mask, classifier = state["base"], state["rubi_mask"], state["rubi_cls"]
    family, labels = state.config.loss_family, batch.labels

    base_forward = base.network.forward(base.params, batch)
    mask_forward = _branch_forward(state, "rubi_mask", batch, base_forward)
    G = mask_forward.logits
    s_g = sigmoid(G)

    masked = base_forward.logits * s_g
    _checked(state, "base", loss(family, masked, labels))
    grad_masked = loss_grad_wrt_logits(family, masked, labels)

    classifier_forward = classifier.network.forward(classifier.params, G)
    classifier_grads = _loss_and_grads(state, "rubi_cls", classifier_forward, labels)

    grad_G = grad_masked * base_forward.logits * s_g * (1.0 - s_g)
    grad_G = grad_G + classifier_grads.inputs["features"]
    mask_grads = mask.network.backward(mask.params, mask_forward.cache, grad_G)
    base_grads = base.network.backward(base.params, base_forward.cache, grad_masked * s_g)

    _apply(state, "base", base_grads)
    _apply(state, "rubi_mask", mask_grads)
    _apply(state, "rubi_cls", classifier_grads)
    return state


def train_step_inverse(state: EnsembleState, batch: Batch) -> EnsembleState:
    """Round one on the labels, round two on the labels minus the top-N predictions.

    Rows left without a positive answer get zero weight in round two.
    """
    base = state["base"]
    first = base.network.forward(base.params, batch)
    _apply(state, "base", _loss_and_grads(state, "base", first, batch.labels))
    probs = probabilities(state.config.loss_family, first.logits)

    reduced = inverse_supervision_round(batch.labels, probs, state.config.inverse_supervision_n)
    weights = non_empty(reduced).astype(np.float64)
    if not weights.any():
        state.last_losses["base_round2"] = 0.0
        return state
    second = base.network.forward(base.params, batch)
    grads = _loss_and_grads(state, "base", second, reduced, weights, record="base_round2")
    _apply(state, "base", grads)
    return state


SPECIAL_STEPS: dict[str, StepFn] = {
    "sum-dq": train_step_sum_dq,
    "rubi": train_step_rubi,
    "inverse-supervision": train_step_inverse,
}

SCHEDULES: dict[str, StepFn] = {"iter": train_step_iter, "tog": train_step_tog}


def model_config_for(data: Dataset, hidden_dim: int = 32) -> ModelConfig:
    return ModelConfig(
        n_regions=data.n_regions,
        evidence_dim=data.evidence_dim,
        context_dim=data.context_dim,
        hidden_dim=hidden_dim,
        num_classes=data.num_classes,
    )


def _check_dimensions(model: ModelConfig, data: Dataset) -> None:
    for name in ("n_regions", "evidence_dim", "context_dim", "num_classes"):
        if getattr(model, name) != getattr(data, name):
            raise ShapeError(f"dataset {name}", getattr(model, name), getattr(data, name))


def train(
    config: TrainingConfig,
    data: Dataset,
    model: ModelConfig | None = None,
    bias_table: DistributionBiasTable | None = None,
) -> RunRecord:
    """Run ``config.epochs`` passes of the configured step over seeded shuffles."""
    model = model or model_config_for(data)
    _check_dimensions(model, data)
    if uses_distribution_bias(config.variant) and bias_table is None:
        bias_table = fit_distribution_bias(data)

    state = build_state(config, model, bias_table)
    step = SCHEDULES[config.schedule]
    n = len(data)
    history: list[dict[str, float]] = []
    started = time.perf_counter()

    for epoch in range(config.epochs):
        order = stream(config.seed, "shuffle", epoch).permutation(n)
        totals: dict[str, float] = {}
        for batch_index, start in enumerate(range(0, n, config.batch_size)):
            indices = order[start : start + config.batch_size]
            state.batch_index = batch_index
            state.last_losses = {}
            step(state, data.batch(indices))
            for name, value in state.last_losses.items():
                totals[name] = totals.get(name, 0.0) + value * len(indices)

        row: dict[str, float] = {"epoch": epoch + 1}
        row.update({name: total / n for name, total in totals.items()})
        history.append(row)
        summary = " ".join(f"{k}={v:.4f}" for k, v in row.items() if k != "epoch")
        logger.info(
            f"[{config.label}] epoch {epoch + 1}/{config.epochs} {summary}",
            extra={"extra": {"variant": config.label, "seed": config.seed, **row}},
        )

    return RunRecord(
        config=config,
        params=state.params(),
        losses=history,
        seed=config.seed,
        wall_time=time.perf_counter() - started,
        bias_table=bias_table,
    )


def train_sum_dq(
    config: TrainingConfig, data: Dataset, model: ModelConfig | None = None
) -> RunRecord:
    return train(config.model_copy(update={"variant": "sum-dq"}), data, model)


def train_rubi(
    config: TrainingConfig, data: Dataset, model: ModelConfig | None = None
) -> RunRecord:
    return train(config.model_copy(update={"variant": "rubi"}), data, model)
