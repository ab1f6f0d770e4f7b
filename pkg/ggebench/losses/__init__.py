"""Classification losses and pseudo-label operators."""

from .classification import (
    LossFamily,
    bce_loss,
    ce_loss,
    loss,
    loss_grad_wrt_logits,
    probabilities,
)
from .pseudo_labels import pseudo_label_bce, pseudo_label_ce

__all__ = [
    "LossFamily",
    "bce_loss",
    "ce_loss",
    "loss",
    "loss_grad_wrt_logits",
    "probabilities",
    "pseudo_label_bce",
    "pseudo_label_ce",
]
