"""Write a RunRecord into its run directory and read checkpoints back."""

import logging

from ggebench.core.artifacts import RunArtifacts
from ggebench.core.errors import EvaluationError
from ggebench.ensemble.state import RunRecord
from ggebench.nn.checkpoint import load_params, save_params
from ggebench.nn.params import Params

logger = logging.getLogger(__name__)


def save_run(record: RunRecord, artifacts: RunArtifacts) -> None:
    """Checkpoints per branch, the per-epoch loss CSV and run metadata."""
    for branch, params in record.params.items():
        path = artifacts.checkpoint_path(branch)
        save_params(params, path)
        artifacts.register_artifact("checkpoint", path, {"branch": branch})

    frame = record.losses_frame()
    frame.to_csv(artifacts.losses_file, index=False)
    artifacts.register_artifact("losses", artifacts.losses_file)

    artifacts.save_metadata(
        {
            "variant": record.config.label,
            "seed": record.seed,
            "epochs": record.config.epochs,
            "branches": record.branches,
            "wall_time_sec": record.wall_time,
            "final_losses": record.final_losses(),
            "distribution_bias": record.bias_table.to_dict() if record.bias_table else None,
        }
    )
    logger.info(f"Run saved to {artifacts.run_dir}")


def load_branch(artifacts: RunArtifacts, branch: str = "base") -> Params:
    path = artifacts.checkpoint_path(branch)
    if not path.exists():
        raise EvaluationError(
            f"Missing checkpoint for branch '{branch}' in {artifacts.run_dir}",
            {"path": path.as_posix()},
        )
    return load_params(path)
