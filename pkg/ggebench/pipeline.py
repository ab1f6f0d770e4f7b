"""Main orchestration pipeline."""

import logging
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from ggebench.benchmark.dataset import (
    Dataset,
    invert_grounding,
    load_dataset,
    save_dataset,
    summarize_priors,
)
from ggebench.benchmark.generator import SPLITS, generate, train_prior
from ggebench.config.loader import load_yaml, save_experiment
from ggebench.config.schema import Experiment
from ggebench.core.artifacts import RunArtifacts
from ggebench.core.errors import EvaluationError
from ggebench.core.fs import atomic_write, ensure_dir
from ggebench.core.logging import log_step, log_to_file
from ggebench.ensemble.persistence import load_branch, save_run
from ggebench.ensemble.state import RunRecord
from ggebench.ensemble.trainer import train
from ggebench.metrics.grounding import MetricsReport, cgr_cgw_cgd, sweep_thresholds
from ggebench.metrics.records import PredictionRecord, dump_predictions, load_predictions
from ggebench.report.aggregate import aggregate_results, summary_rows
from ggebench.report.sink import CSVSink, JSONSink, TableSink
from ggebench.runners.ablation import AblationRunner
from ggebench.runners.evaluator import predict

logger = logging.getLogger(__name__)


def dataset_path(data_dir: Path, split: str) -> Path:
    return Path(data_dir) / f"{split}.jsonl"


class Pipeline:
    """Data generation, training, evaluation, sweeps, ablations and reports."""

    def __init__(self, config: Experiment, verbose: bool = False):
        self.config = config
        self.verbose = verbose

    @property
    def data_dir(self) -> Path:
        return Path(self.config.paths.data_dir)

    def gen_data(self, out_dir: Path | None = None) -> dict[str, Path]:
        """Write the three splits plus a priors report."""
        out_dir = ensure_dir(out_dir or self.data_dir)
        with log_step(logger, "gen-data", seed=self.config.generator.seed):
            splits = generate(self.config.generator)
            paths = {}
            for split, data in splits.items():
                paths[split] = dataset_path(out_dir, split)
                save_dataset(data, paths[split])
            self._write_priors(splits, out_dir)
        return paths

    def _write_priors(self, splits: dict[str, Dataset], out_dir: Path) -> None:
        gen = self.config.generator
        k = gen.answers_per_type
        expected_head = float(train_prior(gen)[0])
        rows = []
        for split, data in splits.items():
            priors = summarize_priors(data)
            counts = np.bincount(data.type_ids, minlength=data.num_types)
            for t in range(data.num_types):
                block = priors[t, t * k : (t + 1) * k]
                n_t = int(counts[t])
                tolerance = 3.0 * np.sqrt(expected_head * (1 - expected_head) / max(n_t, 1))
                rows.append(
                    {
                        "split": split,
                        "type": t,
                        "instances": n_t,
                        "head_mass": float(block[0]),
                        "tail_mass": float(block[-1]),
                        "expected_train_head": expected_head,
                        "tolerance": float(tolerance),
                        "distribution": [float(v) for v in block],
                    }
                )
        JSONSink().write(rows, out_dir / "priors.json")
        flat = [{k: v for k, v in r.items() if k != "distribution"} for r in rows]
        CSVSink().write(flat, out_dir / "priors.csv")

    def load_splits(self, data_dir: Path | None = None) -> dict[str, Dataset]:
        data_dir = Path(data_dir or self.data_dir)
        return {split: load_dataset(dataset_path(data_dir, split)) for split in SPLITS}

    def train(self, data_dir: Path | None = None, run_dir: Path | None = None) -> RunRecord:
        data_dir = Path(data_dir or self.data_dir)
        training = self.config.training
        default_dir = Path(self.config.paths.runs_dir) / f"{training.label}_seed{training.seed}"
        run_dir = run_dir or default_dir
        artifacts = RunArtifacts(run_dir)
        save_experiment(self.config, artifacts.config_file)

        with log_to_file(artifacts.log_file):
            with log_step(logger, "train", variant=training.label, seed=training.seed):
                data = load_dataset(dataset_path(data_dir, "train"))
                record = train(training, data, self.config.model)
                save_run(record, artifacts)
        return record

    def _records(
        self, run_dir: Path | None, data_file: Path | None, invert: bool, predictions: Path | None
    ) -> tuple[list[PredictionRecord], str]:
        if predictions is not None:
            records = load_predictions(predictions)
            if invert:
                records = [
                    PredictionRecord(r.pred_index, r.score, r.attention, 1.0 - r.mask, r.type_id)
                    for r in records
                ]
            return records, Path(predictions).stem
        if run_dir is None or data_file is None:
            raise EvaluationError("Evaluation needs a run directory and a dataset, or predictions")
        params = load_branch(RunArtifacts(run_dir, create=False), "base")
        data = load_dataset(data_file)
        if invert:
            data = invert_grounding(data)
        return predict(params, data), Path(data_file).stem

    def evaluate(
        self,
        run_dir: Path | None,
        data_file: Path | None,
        invert: bool = False,
        predictions: Path | None = None,
        out_dir: Path | None = None,
    ) -> MetricsReport:
        """Score the base model; writes metrics.json and the attribution dump."""
        ev = self.config.evaluation
        with log_step(logger, "eval", invert=invert):
            records, name = self._records(run_dir, data_file, invert, predictions)
            report = cgr_cgw_cgd(records, ev.threshold, ev.cap, ev.strict)

        out_dir = self._report_dir(run_dir, out_dir)
        suffix = "_inverted" if invert else ""
        atomic_write(out_dir / f"metrics_{name}{suffix}.json", report.model_dump_json(indent=2))
        if not invert:
            atomic_write(out_dir / "metrics.json", report.model_dump_json(indent=2))
        if predictions is None:
            dump_predictions(records, out_dir / f"predictions_{name}{suffix}.jsonl")
        return report

    def sweep(
        self,
        run_dir: Path | None,
        data_file: Path | None,
        invert: bool = False,
        predictions: Path | None = None,
        out_dir: Path | None = None,
    ) -> list[MetricsReport]:
        ev = self.config.evaluation
        with log_step(logger, "sweep", thresholds=ev.thresholds):
            records, name = self._records(run_dir, data_file, invert, predictions)
            reports = sweep_thresholds(records, ev.thresholds, ev.strict)

        out_dir = self._report_dir(run_dir, out_dir)
        rows = [r.to_row() for r in reports]
        CSVSink().write(rows, out_dir / f"sweep_{name}.csv")
        table = [{k: r[k] for k in ("threshold", "cap", "cgr", "cgw", "cgd")} for r in rows]
        TableSink(title=f"Threshold sweep: {name}").write(table, out_dir / f"sweep_{name}.txt")
        return reports

    def _report_dir(self, run_dir: Path | None, out_dir: Path | None) -> Path:
        if out_dir is not None:
            return ensure_dir(out_dir)
        if run_dir is not None:
            return RunArtifacts(run_dir).reports_dir
        return ensure_dir(self.config.paths.reports_dir)

    def ablate(
        self,
        out_dir: Path | None = None,
        data_dir: Path | None = None,
        seeds: int | None = None,
        jobs: int | None = None,
    ) -> pd.DataFrame:
        """Train every ablation variant over several seeds; writes per-run and summary tables."""
        ablation = self.config.ablation
        out_dir = ensure_dir(out_dir or self.config.paths.reports_dir)
        data_dir = Path(data_dir or self.data_dir)
        if not all(dataset_path(data_dir, split).exists() for split in SPLITS):
            logger.info(f"Datasets missing in {data_dir}; generating")
            self.gen_data(data_dir)

        runner = AblationRunner(self.config, self.load_splits(data_dir), out_dir / "runs")
        with log_step(logger, "ablate", variants=len(ablation.variants)):
            rows = runner.run_matrix(
                ablation.variants, seeds or ablation.seeds, jobs or ablation.jobs
            )

        stats = aggregate_results(rows)
        CSVSink().write(rows, out_dir / "ablation_runs.csv")
        CSVSink().write(stats.to_dict(orient="records"), out_dir / "ablation.csv")
        TableSink(title="Ablation (mean ± std over seeds)").write(
            summary_rows(stats), out_dir / "ablation.txt"
        )
        return stats

    def report(self, run_dirs: list[Path], out_dir: Path | None = None) -> list[dict[str, Any]]:
        """Collect metrics.json of several runs into one CSV and table."""
        rows = []
        for run_dir in run_dirs:
            artifacts = RunArtifacts(run_dir, create=False)
            metrics_file = artifacts.reports_dir / "metrics.json"
            if not metrics_file.exists():
                raise EvaluationError(f"No metrics.json in {artifacts.reports_dir}")
            report = MetricsReport.model_validate_json(metrics_file.read_text())
            metadata = artifacts.load_metadata()
            config = load_yaml(artifacts.config_file) if artifacts.config_file.exists() else {}
            label = metadata.get("variant") or config.get("training", {}).get("variant", "?")
            rows.append({"run": Path(run_dir).name, "variant": label, **report.to_row()})

        out_dir = ensure_dir(out_dir or self.config.paths.reports_dir)
        CSVSink().write(rows, out_dir / "report.csv")
        columns = ("run", "variant", "accuracy", "cgr", "cgw", "cgd", "threshold", "cap")
        TableSink(title="Runs").write(
            [{k: row[k] for k in columns} for row in rows], out_dir / "report.txt"
        )
        return rows
