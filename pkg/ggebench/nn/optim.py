"""Adamax optimiser."""

from dataclasses import dataclass, field

import numpy as np

from ggebench.core.errors import NumericError, ShapeError
from ggebench.nn.params import ParamGrads, Params


@dataclass
class OptimizerState:
    """Adamax moments for one parameter collection.

    ``m`` is the first-moment estimate and ``u`` the exponentially weighted
    infinity norm, both shaped like the parameters they track.
    """

    lr: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    u: dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def for_params(
        cls, params: Params, lr: float = 0.001, beta1: float = 0.9, beta2: float = 0.999
    ) -> "OptimizerState":
        if lr <= 0:
            raise ValueError(f"Learning rate must be positive, got {lr}")
        return cls(
            lr=lr,
            beta1=beta1,
            beta2=beta2,
            m={name: np.zeros_like(value) for name, value in params.items()},
            u={name: np.zeros_like(value) for name, value in params.items()},
        )

    def copy(self) -> "OptimizerState":
        return OptimizerState(
            lr=self.lr,
            beta1=self.beta1,
            beta2=self.beta2,
            eps=self.eps,
            t=self.t,
            m={k: v.copy() for k, v in self.m.items()},
            u={k: v.copy() for k, v in self.u.items()},
        )


def adamax_step(
    state: OptimizerState, params: Params, grads: ParamGrads | Params
) -> tuple[Params, OptimizerState]:
    """Apply one Adamax update.

    m <- b1 m + (1 - b1) g;  u <- max(b2 u, |g|);  p <- p - lr / (1 - b1^t) * m / (u + eps)

    ``params`` and ``state`` are owned by the caller and updated in place.
    """
    grad_map = grads.params if isinstance(grads, ParamGrads) else grads
    for name, grad in grad_map.items():
        if not np.all(np.isfinite(grad)):
            raise NumericError(name)
        if name not in state.m:
            raise ShapeError("optimizer state", list(state.m), name)
        if grad.shape != params[name].shape:
            raise ShapeError(f"gradient '{name}'", params[name].shape, grad.shape)

    state.t += 1
    step_size = state.lr / (1.0 - state.beta1**state.t)
    for name, grad in grad_map.items():
        state.m[name] = state.beta1 * state.m[name] + (1.0 - state.beta1) * grad
        state.u[name] = np.maximum(state.beta2 * state.u[name], np.abs(grad))
        params[name] = params[name] - step_size * state.m[name] / (state.u[name] + state.eps)
    params.touch()
    return params, state
