"""Bias sources and ensemble composition."""

from dataclasses import dataclass

import numpy as np

from ggebench.benchmark.dataset import Dataset, accumulate_label_mass
from ggebench.core.errors import ConfigError, DatasetError
from ggebench.losses.classification import LossFamily
from ggebench.losses.pseudo_labels import pseudo_label_bce, pseudo_label_ce
from ggebench.nn.layers import sigmoid, softmax

# Variants whose ensemble output can be composed, and the components each needs.
ENSEMBLE_COMPONENTS: dict[str, tuple[bool, bool]] = {
    # variant: (needs distribution row, needs biased logits)
    "gge-d": (True, False),
    "gge-q": (False, True),
    "gge-sf": (False, True),
    "gge-dq": (True, True),
    "gge-d-sf": (True, True),
}


@dataclass(frozen=True)
class DistributionBiasTable:
    """Per-type answer distribution of the train split; held fixed during training."""

    table: np.ndarray  # (T, C)

    @property
    def num_types(self) -> int:
        return int(self.table.shape[0])

    @property
    def num_classes(self) -> int:
        return int(self.table.shape[1])

    def rows(self, type_ids: np.ndarray | int) -> np.ndarray:
        return self.table[type_ids]

    def to_dict(self) -> dict[str, list[list[float]]]:
        return {"table": [[float(v) for v in row] for row in self.table]}

    @classmethod
    def from_dict(cls, data: dict[str, list[list[float]]]) -> "DistributionBiasTable":
        return cls(np.asarray(data["table"], dtype=np.float64))


def distribution_bias_from_labels(
    type_ids: np.ndarray, labels: np.ndarray, num_types: int
) -> DistributionBiasTable:
    """Accumulate label mass per type and normalise each row."""
    labels = np.asarray(labels, dtype=np.float64)
    if labels.shape[0] == 0:
        raise DatasetError("Cannot fit a distribution bias on an empty dataset")
    mass = accumulate_label_mass(np.asarray(type_ids), labels, num_types)
    totals = mass.sum(axis=1)
    empty = [t for t in range(num_types) if totals[t] <= 0]
    if empty:
        raise DatasetError(
            f"Type {empty[0]} has no label mass in the train split",
            {"empty_types": empty},
        )
    return DistributionBiasTable(mass / totals[:, None])


def fit_distribution_bias(train: Dataset) -> DistributionBiasTable:
    return distribution_bias_from_labels(train.type_ids, train.labels, train.num_types)


def compose_ensemble(
    variant: str,
    bias_row: np.ndarray | None = None,
    biased_logits: np.ndarray | None = None,
    family: LossFamily = "bce",
) -> np.ndarray:
    """Ensemble output H at which the next branch's pseudo-label is taken.

    Under BCE the learned branch enters as sigmoid(B); under softmax CE the
    whole output lives in probability space, so it enters as softmax(B). The
    distribution row is used as is in both families.
    """
    if variant not in ENSEMBLE_COMPONENTS:
        raise ConfigError(f"Variant '{variant}' has no biased ensemble")
    needs_row, needs_logits = ENSEMBLE_COMPONENTS[variant]
    missing = []
    if needs_row and bias_row is None:
        missing.append("distribution bias row")
    if needs_logits and biased_logits is None:
        missing.append("biased-branch logits")
    if missing:
        raise ConfigError(f"Variant '{variant}' is missing ensemble components", missing)

    H: np.ndarray | float = 0.0
    if needs_logits:
        assert biased_logits is not None
        B = np.asarray(biased_logits, dtype=np.float64)
        H = sigmoid(B) if family == "bce" else softmax(B, axis=-1)
    if needs_row:
        H = H + np.asarray(bias_row, dtype=np.float64)
    return np.asarray(H, dtype=np.float64)


def pseudo_targets(family: LossFamily, labels: np.ndarray, H: np.ndarray) -> np.ndarray:
    """Clamped negative gradient of the ensemble loss at H."""
    if family == "bce":
        return pseudo_label_bce(labels, H)
    return pseudo_label_ce(labels, H)
