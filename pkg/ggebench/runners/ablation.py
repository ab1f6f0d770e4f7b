"""Variant x seed ablation runs."""

import logging
from collections.abc import Callable
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, get_args

from ggebench.benchmark.dataset import Dataset, invert_grounding
from ggebench.config.loader import save_experiment
from ggebench.config.schema import Experiment, TrainingConfig, Variant
from ggebench.core.artifacts import RunArtifacts
from ggebench.core.errors import ConfigError, GGEBenchError
from ggebench.ensemble.persistence import save_run
from ggebench.ensemble.trainer import train
from ggebench.runners.evaluator import evaluate

logger = logging.getLogger(__name__)


def parse_label(label: str) -> dict[str, Any]:
    """Training overrides for a run label such as ``gge-dq-tog`` or ``gge-d-vo``.

    A ``-vo`` suffix selects the evidence-only base; ``-iter``/``-tog`` the schedule.
    """
    rest = label
    overrides: dict[str, Any] = {}
    if rest.endswith("-vo"):
        overrides["vision_only"] = True
        rest = rest[: -len("-vo")]
    for schedule in ("iter", "tog"):
        if rest.endswith(f"-{schedule}"):
            overrides["schedule"] = schedule
            rest = rest[: -len(schedule) - 1]
            break
    if rest not in get_args(Variant):
        valid = ", ".join(get_args(Variant))
        raise ConfigError(f"Unknown variant label '{label}'", [f"valid: {valid}"])
    overrides["variant"] = rest
    return overrides


class AblationRunner:
    """Train and score every requested variant over several seeds."""

    def __init__(
        self,
        experiment: Experiment,
        splits: dict[str, Dataset],
        runs_dir: Path | None = None,
    ):
        self.experiment = experiment
        self.splits = splits
        self.runs_dir = Path(runs_dir) if runs_dir is not None else None

    def training_config(self, label: str, run_index: int) -> TrainingConfig:
        data = self.experiment.training.model_dump()
        data.update(parse_label(label))
        data["seed"] = self.experiment.training.seed + run_index
        return TrainingConfig.model_validate(data)

    def run_single(self, label: str, run_index: int) -> dict[str, Any]:
        """Train one variant at one seed and score it on both test splits."""
        training = self.training_config(label, run_index)
        try:
            record = train(training, self.splits["train"], self.experiment.model)
            if self.runs_dir is not None:
                artifacts = RunArtifacts(self.runs_dir / label / f"seed_{training.seed}")
                save_run(record, artifacts)
                save_experiment(
                    self.experiment.model_copy(update={"training": training}),
                    artifacts.config_file,
                )

            ev = self.experiment.evaluation
            params = record.base_params
            ood, _ = evaluate(params, self.splits["test_ood"], ev.threshold, ev.cap, ev.strict)
            in_dist, _ = evaluate(params, self.splits["test_id"], ev.threshold, ev.cap, ev.strict)
            inverted, _ = evaluate(
                params, invert_grounding(self.splits["test_ood"]), ev.threshold, ev.cap, ev.strict
            )
        except GGEBenchError as e:
            raise GGEBenchError(
                f"Ablation run '{label}' (seed {training.seed}) failed: {e}",
                {"variant": label, "seed": training.seed, **e.details},
            ) from e

        timing = {"variant": label, "seed": training.seed, "wall_time_sec": record.wall_time}
        logger.info(
            f"Finished {label} seed {training.seed} in {record.wall_time:.1f}s",
            extra={"extra": timing},
        )
        return {
            "variant": label,
            "seed": training.seed,
            "ood_acc": 100.0 * ood.accuracy,
            "id_acc": 100.0 * in_dist.accuracy,
            "cgr": ood.cgr,
            "cgw": ood.cgw,
            "cgd": ood.cgd,
            "cgd_inverted": inverted.cgd,
        }

    def run_matrix(
        self,
        labels: list[str],
        seeds: int,
        jobs: int = 1,
        progress_callback: Callable[[int, int], None] | None = None,
    ) -> list[dict[str, Any]]:
        """Rows ordered by label then seed, whatever the worker count."""
        for label in labels:
            parse_label(label)
        plan = [(label, run_index) for label in labels for run_index in range(seeds)]
        total = len(plan)

        if jobs <= 1:
            results = []
            for completed, (label, run_index) in enumerate(plan, start=1):
                logger.info(f"Running {label} - seed {run_index + 1}/{seeds}")
                results.append(self.run_single(label, run_index))
                if progress_callback:
                    progress_callback(completed, total)
            return results

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(self.run_single, label, i) for label, i in plan]
            results = []
            for completed, future in enumerate(futures, start=1):
                results.append(future.result())
                if progress_callback:
                    progress_callback(completed, total)
            return results
