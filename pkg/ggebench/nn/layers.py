"""Dense layer primitives with their local derivatives."""

import numpy as np

from ggebench.core.errors import ShapeError


def linear_forward(W: np.ndarray, b: np.ndarray | None, x: np.ndarray) -> np.ndarray:
    """Return ``W x + b`` for a vector or a batch of row vectors."""
    if W.ndim != 2:
        raise ShapeError("weight", "2-D matrix", W.shape)
    if x.shape[-1] != W.shape[1]:
        raise ShapeError("linear input", W.shape[1], x.shape[-1])
    out = x @ W.T
    if b is not None:
        if b.shape != (W.shape[0],):
            raise ShapeError("bias", (W.shape[0],), b.shape)
        out = out + b
    return out


def linear_backward(
    W: np.ndarray, x: np.ndarray, grad_out: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gradients of ``x W^T + b`` w.r.t. W, b and x.

    Leading axes of ``x``/``grad_out`` are summed over for W and b.
    """
    x2 = x.reshape(-1, x.shape[-1])
    g2 = grad_out.reshape(-1, grad_out.shape[-1])
    grad_W = g2.T @ x2
    grad_b = g2.sum(axis=0)
    grad_x = grad_out @ W
    return grad_W, grad_b, grad_x


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def relu_backward(pre: np.ndarray, grad_out: np.ndarray) -> np.ndarray:
    return grad_out * (pre > 0)


def sigmoid(z: np.ndarray | float) -> np.ndarray:
    """Overflow-free logistic function."""
    z = np.asarray(z, dtype=np.float64)
    ez = np.exp(-np.abs(z))
    return np.where(z >= 0, 1.0 / (1.0 + ez), ez / (1.0 + ez))


def log_sigmoid(z: np.ndarray) -> np.ndarray:
    return -np.logaddexp(0.0, -np.asarray(z, dtype=np.float64))


def softmax(z: np.ndarray, axis: int = -1) -> np.ndarray:
    """Softmax with max subtraction."""
    shifted = z - np.max(z, axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / np.sum(e, axis=axis, keepdims=True)


def log_softmax(z: np.ndarray, axis: int = -1) -> np.ndarray:
    shifted = z - np.max(z, axis=axis, keepdims=True)
    return shifted - np.log(np.sum(np.exp(shifted), axis=axis, keepdims=True))


def softmax_backward(probs: np.ndarray, grad_out: np.ndarray, axis: int = -1) -> np.ndarray:
    """Vector-Jacobian product of softmax."""
    inner = np.sum(probs * grad_out, axis=axis, keepdims=True)
    return probs * (grad_out - inner)
