"""Sigmoid+BCE and softmax+CE losses with their logit gradients."""

from typing import Literal

import numpy as np

from ggebench.nn.layers import log_softmax, log_sigmoid, sigmoid, softmax

LossFamily = Literal["bce", "sxce"]

LOG_FLOOR = float(np.log(1e-12))


def _reduce(per_row: np.ndarray, sample_weights: np.ndarray | None) -> float:
    """Sum over classes was already taken; average rows over the batch."""
    if sample_weights is not None:
        per_row = per_row * sample_weights
    return float(np.mean(per_row))


def bce_loss(
    logits: np.ndarray, labels: np.ndarray, sample_weights: np.ndarray | None = None
) -> float:
    """-sum_i [y log s(z) + (1 - y) log(1 - s(z))], averaged over a leading batch axis."""
    z = np.atleast_2d(np.asarray(logits, dtype=np.float64))
    y = np.atleast_2d(np.asarray(labels, dtype=np.float64))
    log_p = np.maximum(log_sigmoid(z), LOG_FLOOR)
    log_not_p = np.maximum(log_sigmoid(-z), LOG_FLOOR)
    per_row = -np.sum(y * log_p + (1.0 - y) * log_not_p, axis=-1)
    return _reduce(per_row, sample_weights)


def ce_loss(
    logits: np.ndarray, labels: np.ndarray, sample_weights: np.ndarray | None = None
) -> float:
    """-sum_i y_i log softmax(z)_i, averaged over a leading batch axis."""
    z = np.atleast_2d(np.asarray(logits, dtype=np.float64))
    y = np.atleast_2d(np.asarray(labels, dtype=np.float64))
    per_row = -np.sum(y * log_softmax(z, axis=-1), axis=-1)
    return _reduce(per_row, sample_weights)


def loss(
    family: LossFamily,
    logits: np.ndarray,
    labels: np.ndarray,
    sample_weights: np.ndarray | None = None,
) -> float:
    if family == "bce":
        return bce_loss(logits, labels, sample_weights)
    if family == "sxce":
        return ce_loss(logits, labels, sample_weights)
    raise ValueError(f"Unknown loss family: {family}")


def loss_grad_wrt_logits(
    family: LossFamily,
    logits: np.ndarray,
    labels: np.ndarray,
    sample_weights: np.ndarray | None = None,
) -> np.ndarray:
    """Analytic gradient of the (batch-averaged) loss with respect to the logits.

    BCE: s(z) - y. CE: softmax(z) * sum(y) - y, which is softmax(z) - y for
    labels summing to one.
    """
    z = np.asarray(logits, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if family == "bce":
        grad = sigmoid(z) - y
    elif family == "sxce":
        grad = softmax(z, axis=-1) * np.sum(y, axis=-1, keepdims=True) - y
    else:
        raise ValueError(f"Unknown loss family: {family}")

    if z.ndim == 1:
        return grad if sample_weights is None else grad * float(np.asarray(sample_weights))
    if sample_weights is not None:
        grad = grad * np.asarray(sample_weights)[:, None]
    return grad / z.shape[0]


def probabilities(family: LossFamily, logits: np.ndarray) -> np.ndarray:
    """Per-class scores the family assigns: sigmoid for BCE, softmax for CE."""
    return sigmoid(logits) if family == "bce" else softmax(logits, axis=-1)
