"""Inverse supervision: drop the model's most confident answers from the labels."""

import numpy as np


def top_n_answers(probs: np.ndarray, n: int) -> np.ndarray:
    """Indices of the ``n`` highest-probability answers; ties go to the lower index."""
    probs = np.atleast_2d(np.asarray(probs, dtype=np.float64))
    return np.argsort(-probs, axis=-1, kind="stable")[:, :n]


def inverse_supervision_round(labels: np.ndarray, probs: np.ndarray, n: int = 1) -> np.ndarray:
    """Labels with the top-``n`` predicted answers removed from the positive set."""
    if n < 1:
        raise ValueError(f"N must be >= 1, got {n}")
    labels = np.asarray(labels, dtype=np.float64)
    reduced = np.atleast_2d(labels).copy()
    rows = np.arange(reduced.shape[0])[:, None]
    reduced[rows, top_n_answers(probs, n)] = 0.0
    return reduced.reshape(labels.shape)


def non_empty(labels: np.ndarray) -> np.ndarray:
    """Row mask of label sets that still have a positive answer."""
    return np.atleast_2d(labels).sum(axis=-1) > 0
