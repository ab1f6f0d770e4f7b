"""Per-run training state: one network, parameter set and optimiser per branch."""

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from ggebench.config.schema import ModelConfig, TrainingConfig
from ggebench.core.errors import ConfigError
from ggebench.core.rng import derive_seed
from ggebench.ensemble.bias import DistributionBiasTable
from ggebench.models.networks import (
    AttentionNet,
    ContextBranch,
    EvidenceNet,
    LinearHead,
    Network,
)
from ggebench.nn.optim import OptimizerState
from ggebench.nn.params import Params

DISTRIBUTION_VARIANTS = frozenset({"gge-d", "gge-dq", "gge-d-sf", "sum-dq"})


def uses_distribution_bias(variant: str) -> bool:
    return variant in DISTRIBUTION_VARIANTS


def branch_names(config: TrainingConfig) -> list[str]:
    """Branches trained for the configured variant; ``base`` always comes first."""
    names = ["base"]
    if config.variant in ("gge-q", "gge-dq", "sum-dq"):
        names.append("shortcut")
    elif config.variant in ("gge-sf", "gge-d-sf"):
        names.append("self")
    elif config.variant == "rubi":
        names.extend(["rubi_mask", "rubi_cls"])
    return names


def base_network(config: TrainingConfig, model: ModelConfig) -> Network:
    if config.evidence_only:
        return EvidenceNet(model.evidence_dim, model.hidden_dim, model.num_classes)
    return AttentionNet(
        model.evidence_dim,
        model.context_dim,
        model.hidden_dim,
        model.num_classes,
        n_regions=model.n_regions,
    )


def branch_network(name: str, config: TrainingConfig, model: ModelConfig) -> Network:
    H, C = model.hidden_dim, model.num_classes
    if name == "base":
        return base_network(config, model)
    if name == "shortcut":
        return ContextBranch(model.context_dim, H, C)
    if name == "self":
        return LinearHead("self", H, C)
    if name == "rubi_mask":
        if config.rubi_source == "joint":
            return LinearHead("rubi_mask", H, C)
        return ContextBranch(model.context_dim, H, C)
    if name == "rubi_cls":
        return LinearHead("rubi_cls", C, C)
    raise ConfigError(f"Unknown branch '{name}'")


@dataclass
class Branch:
    network: Network
    params: Params
    optimizer: OptimizerState

    def copy(self) -> "Branch":
        return Branch(self.network, self.params.copy(), self.optimizer.copy())


@dataclass
class EnsembleState:
    """Everything a step function reads and updates.

    ``last_losses`` holds the loss of each branch on the most recent batch.
    """

    config: TrainingConfig
    branches: dict[str, Branch]
    bias_table: DistributionBiasTable | None = None
    batch_index: int = 0
    last_losses: dict[str, float] = field(default_factory=dict)

    def __getitem__(self, name: str) -> Branch:
        try:
            return self.branches[name]
        except KeyError:
            raise ConfigError(
                f"Variant '{self.config.variant}' has no branch '{name}'",
                [f"available: {', '.join(self.branches)}"],
            ) from None

    def __contains__(self, name: str) -> bool:
        return name in self.branches

    def bias_rows(self, type_ids: np.ndarray) -> np.ndarray:
        if self.bias_table is None:
            raise ConfigError(f"Variant '{self.config.variant}' needs a distribution bias table")
        return self.bias_table.rows(type_ids)

    def params(self) -> dict[str, Params]:
        return {name: branch.params for name, branch in self.branches.items()}

    def copy(self) -> "EnsembleState":
        return EnsembleState(
            config=self.config,
            branches={name: branch.copy() for name, branch in self.branches.items()},
            bias_table=self.bias_table,
            batch_index=self.batch_index,
            last_losses=dict(self.last_losses),
        )


def build_state(
    config: TrainingConfig,
    model: ModelConfig,
    bias_table: DistributionBiasTable | None = None,
) -> EnsembleState:
    """Initialise every branch from its own derived seed."""
    if uses_distribution_bias(config.variant) and bias_table is None:
        raise ConfigError(f"Variant '{config.variant}' needs a distribution bias table")
    branches = {}
    for name in branch_names(config):
        network = branch_network(name, config, model)
        params = network.init(derive_seed(config.seed, "init", name))
        optimizer = OptimizerState.for_params(params, config.lr, config.beta1, config.beta2)
        branches[name] = Branch(network, params, optimizer)
    return EnsembleState(config=config, branches=branches, bias_table=bias_table)


@dataclass
class RunRecord:
    """Outcome of a training run; only ``params['base']`` is used at test time."""

    config: TrainingConfig
    params: dict[str, Params]
    losses: list[dict[str, float]]
    seed: int
    wall_time: float
    bias_table: DistributionBiasTable | None = None

    @property
    def base_params(self) -> Params:
        return self.params["base"]

    @property
    def branches(self) -> list[str]:
        return list(self.params)

    def losses_frame(self) -> pd.DataFrame:
        """Per-epoch mean losses, one column per branch."""
        columns = ["epoch"]
        for row in self.losses:
            columns.extend(key for key in row if key not in columns)
        return pd.DataFrame(self.losses, columns=columns)

    def final_losses(self) -> dict[str, float]:
        if not self.losses:
            return {}
        return {k: v for k, v in self.losses[-1].items() if k != "epoch"}
