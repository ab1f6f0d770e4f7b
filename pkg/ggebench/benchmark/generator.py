"""Synthetic changing-prior benchmark.

Each type owns a disjoint block of answers. Evidence carries the answer in one
signal region (plus distractor regions from other types); the context carries
the type embedding and an answer cue that is usually right in train and always
wrong in ``test_ood``, whose per-type prior is the train prior reversed.
"""

import logging
from typing import NamedTuple

import numpy as np

from ggebench.benchmark.dataset import Dataset, DatasetMeta, Split
from ggebench.config.schema import GeneratorConfig
from ggebench.core.errors import ConfigError
from ggebench.core.rng import stream

logger = logging.getLogger(__name__)

SPLITS: tuple[Split, ...] = ("train", "test_ood", "test_id")


class Prototypes(NamedTuple):
    evidence: np.ndarray  # (C, d_v) unit rows
    context: np.ndarray  # (C, d_q) unit rows


def _unit_rows(values: np.ndarray) -> np.ndarray:
    return values / np.linalg.norm(values, axis=1, keepdims=True)


def prototypes(config: GeneratorConfig) -> Prototypes:
    """Fixed per-seed answer prototypes for evidence and context cues.

    With ``type_affinity > 0`` every evidence prototype of type t leans toward
    feature channel t, so a region's type is readable before its answer.
    """
    C = config.num_classes
    mu = stream(config.seed, "prototypes", "evidence").normal(size=(C, config.evidence_dim))
    if config.type_affinity > 0:
        channels = np.eye(config.evidence_dim)[np.arange(C) // config.answers_per_type]
        mu = _unit_rows(mu) + config.type_affinity * channels
    u = stream(config.seed, "prototypes", "context").normal(size=(C, config.context_dim))
    return Prototypes(_unit_rows(mu), _unit_rows(u))


def train_prior(config: GeneratorConfig) -> np.ndarray:
    """Within-type answer prior: head answer first, the rest uniform."""
    k = config.answers_per_type
    prior = np.full(k, (1.0 - config.head_mass) / (k - 1))
    prior[0] = config.head_mass
    return prior


def split_prior(config: GeneratorConfig, split: Split) -> np.ndarray:
    prior = train_prior(config)
    return prior[::-1].copy() if split == "test_ood" else prior


def _sample_local(rng: np.random.Generator, prior: np.ndarray, n: int) -> np.ndarray:
    cdf = np.cumsum(prior)
    local = np.searchsorted(cdf, rng.random(n), side="right")
    return np.minimum(local, len(prior) - 1)


def _wrong_local(rng: np.random.Generator, local: np.ndarray, k: int) -> np.ndarray:
    return (local + rng.integers(1, k, size=local.shape)) % k


def generate_split(
    config: GeneratorConfig, split: Split, protos: Prototypes | None = None
) -> Dataset:
    """Generate one split; draws depend only on (seed, split name)."""
    protos = protos or prototypes(config)
    T, k = config.num_types, config.answers_per_type
    n_v, d_v, d_q = config.n_regions, config.evidence_dim, config.context_dim
    n = config.n_train if split == "train" else config.n_test
    sigma = config.noise_sigma

    def draw(name: str) -> np.random.Generator:
        return stream(config.seed, "split", split, name)

    types = draw("types").integers(0, T, size=n)
    local = _sample_local(draw("answers"), split_prior(config, split), n)
    answers = types * k + local
    rows = np.arange(n)

    # distractors come from other types so the type embedding singles out the signal region
    rng = draw("distractors")
    other_types = (types[:, None] + rng.integers(1, max(T, 2), size=(n, n_v))) % T
    region_answers = other_types * k + rng.integers(0, k, size=(n, n_v))
    signal = draw("signal").integers(0, n_v, size=n)
    region_answers[rows, signal] = answers

    evidence = protos.evidence[region_answers] + draw("evidence_noise").normal(
        0.0, sigma, size=(n, n_v, d_v)
    )
    masks = np.zeros((n, n_v))
    masks[rows, signal] = 1.0

    rng = draw("cues")
    wrong = _wrong_local(rng, local, k)
    keep = rng.random(n) < config.shortcut_rate
    if split == "test_ood":
        keep[:] = False
    cues = types * k + np.where(keep, local, wrong)

    type_embedding = np.eye(d_q)[types]
    context = (
        type_embedding
        + protos.context[cues]
        + draw("context_noise").normal(0.0, sigma, size=(n, d_q))
    )

    labels = np.zeros((n, config.num_classes))
    if config.soft_labels:
        top, second, third = config.soft_scores
        # assigned far-to-near so a* wins when k == 2 wraps onto itself
        labels[rows, types * k + (local + 2) % k] = third
        labels[rows, types * k + (local + 1) % k] = second
        labels[rows, answers] = top
    else:
        labels[rows, answers] = 1.0

    meta = DatasetMeta(split=split, num_types=T, config=config.model_dump(mode="json"))
    return Dataset(evidence, context, types.astype(np.int64), labels, masks, meta, cues)


def generate(config: GeneratorConfig) -> dict[str, Dataset]:
    """Generate the train, test_ood and test_id splits."""
    problems = config.violations()
    if problems:
        raise ConfigError("Invalid generator configuration", problems)

    protos = prototypes(config)
    splits = {split: generate_split(config, split, protos) for split in SPLITS}
    logger.info(
        "Generated benchmark",
        extra={"extra": {"seed": config.seed, **{s: len(d) for s, d in splits.items()}}},
    )
    return splits
