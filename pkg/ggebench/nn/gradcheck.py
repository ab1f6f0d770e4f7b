"""Finite-difference verification of the hand-written backward passes."""

import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any, Protocol

import numpy as np

from ggebench.losses.classification import LossFamily, loss, loss_grad_wrt_logits
from ggebench.nn.params import ParamGrads, Params

logger = logging.getLogger(__name__)

Objective = Callable[[np.ndarray], tuple[float, np.ndarray]]


class _Forwardable(Protocol):
    def forward(self, params: Params, inputs: Any) -> Any: ...

    def backward(self, params: Params, cache: Any, grad_logits: np.ndarray) -> ParamGrads: ...


@dataclass
class GradCheckReport:
    """Per-tensor relative errors ||a - n|| / (||a|| + ||n||).

    A tensor whose absolute difference is within ``atol`` scores 0, so gradients
    that are exactly zero are not judged on finite-difference roundoff.
    """

    errors: dict[str, float] = field(default_factory=dict)
    skipped: int = 0

    @property
    def max_error(self) -> float:
        return max(self.errors.values(), default=0.0)


def _relative_error(analytic: np.ndarray, numeric: np.ndarray, atol: float) -> float:
    diff = float(np.linalg.norm(analytic - numeric))
    if diff <= atol:
        return 0.0
    denom = max(float(np.linalg.norm(analytic) + np.linalg.norm(numeric)), 1e-12)
    return diff / denom


def grad_check_report(
    network: _Forwardable,
    params: Params,
    inputs: Any,
    labels: np.ndarray,
    eps: float = 1e-4,
    family: LossFamily = "bce",
    objective: Objective | None = None,
    grad_transform: Callable[[ParamGrads], ParamGrads] | None = None,
    atol: float = 1e-8,
) -> GradCheckReport:
    """Compare analytic parameter gradients with central differences.

    ``objective`` maps logits to (loss, dloss/dlogits); by default it is the
    batch-averaged loss of ``family`` against ``labels``. Coordinates whose
    perturbation flips a ReLU on/off state are skipped, since the loss is not
    differentiable across such a kink.
    """
    if not 0 < eps <= 1e-2:
        raise ValueError(f"eps must lie in (0, 1e-2], got {eps}")

    def evaluate(logits: np.ndarray) -> tuple[float, np.ndarray]:
        if objective is not None:
            return objective(logits)
        return loss(family, logits, labels), loss_grad_wrt_logits(family, logits, labels)

    out = network.forward(params, inputs)
    _, grad_logits = evaluate(out.logits)
    analytic = network.backward(params, out.cache, grad_logits)
    if grad_transform is not None:
        analytic = grad_transform(analytic)
    pattern = out.cache.activation_pattern()

    report = GradCheckReport()
    for name, value in params.items():
        numeric = np.zeros_like(value)
        keep = np.ones(value.shape, dtype=bool)
        flat = value.reshape(-1)
        for idx in range(flat.size):
            original = flat[idx]
            flat[idx] = original + eps
            plus = network.forward(params, inputs)
            flat[idx] = original - eps
            minus = network.forward(params, inputs)
            flat[idx] = original
            pos = np.unravel_index(idx, value.shape)
            if (
                plus.cache.activation_pattern() != pattern
                or minus.cache.activation_pattern() != pattern
            ):
                keep[pos] = False
                report.skipped += 1
                continue
            numeric[pos] = (evaluate(plus.logits)[0] - evaluate(minus.logits)[0]) / (2.0 * eps)
        report.errors[name] = _relative_error(analytic[name][keep], numeric[keep], atol)

    if report.skipped:
        logger.debug(f"Gradient check skipped {report.skipped} coordinates at ReLU kinks")
    return report


def grad_check(
    network: _Forwardable,
    params: Params,
    inputs: Any,
    labels: np.ndarray,
    eps: float = 1e-4,
    family: LossFamily = "bce",
    objective: Objective | None = None,
    grad_transform: Callable[[ParamGrads], ParamGrads] | None = None,
    atol: float = 1e-8,
) -> float:
    """Maximum relative error between analytic and numerical gradients."""
    return grad_check_report(
        network, params, inputs, labels, eps, family, objective, grad_transform, atol
    ).max_error
