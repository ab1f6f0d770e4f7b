"""Synthetic changing-prior benchmark and dataset persistence."""

from .dataset import (
    Dataset,
    DatasetMeta,
    accumulate_label_mass,
    invert_grounding,
    load_dataset,
    save_dataset,
    summarize_priors,
)
from .generator import SPLITS, generate, generate_split, prototypes, split_prior, train_prior

__all__ = [
    "Dataset",
    "DatasetMeta",
    "SPLITS",
    "accumulate_label_mass",
    "generate",
    "generate_split",
    "invert_grounding",
    "load_dataset",
    "prototypes",
    "save_dataset",
    "split_prior",
    "summarize_priors",
    "train_prior",
]
