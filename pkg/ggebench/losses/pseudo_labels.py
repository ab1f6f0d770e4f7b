"""Negative-gradient pseudo-labels for greedy ensembling."""

import numpy as np

from ggebench.nn.layers import sigmoid


def pseudo_label_bce(labels: np.ndarray, H: np.ndarray, clip: bool = True) -> np.ndarray:
    """2 y s(-2 y H), clamped into the BCE label space [0, 1].

    Zero wherever the label is zero. ``clip=False`` returns the raw negative
    gradient, which reaches 2.0 on hard positives.
    """
    y = np.asarray(labels, dtype=np.float64)
    H = np.asarray(H, dtype=np.float64)
    raw = 2.0 * y * sigmoid(-2.0 * y * H)
    return np.clip(raw, 0.0, 1.0) if clip else raw


def pseudo_label_ce(labels: np.ndarray, probs: np.ndarray) -> np.ndarray:
    """y - p on the label support, clamped into [0, 1]; zero elsewhere."""
    y = np.asarray(labels, dtype=np.float64)
    p = np.asarray(probs, dtype=np.float64)
    return np.where(y > 0, np.clip(y - p, 0.0, 1.0), 0.0)
