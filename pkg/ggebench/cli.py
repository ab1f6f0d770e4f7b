"""Command-line interface for ggebench."""

import json
import sys
from collections.abc import Callable
from functools import wraps
from pathlib import Path
from typing import Any

import typer
from rich.console import Console
from rich.markup import escape

from ggebench.config.loader import load_experiment
from ggebench.config.schema import Experiment
from ggebench.core.errors import GGEBenchError
from ggebench.core.logging import setup_logging
from ggebench.pipeline import Pipeline, dataset_path
from ggebench.report.sink import render_table

app = typer.Typer(
    name="ggebench",
    help="Greedy gradient ensemble de-bias training on a changing-prior benchmark",
    add_completion=False,
    pretty_exceptions_enable=False,
    rich_markup_mode=None,
)

console = Console()
err_console = Console(stderr=True)

ConfigOption = typer.Option(None, "-c", "--config", help="Experiment config YAML file")
VerboseOption = typer.Option(False, "-v", "--verbose", help="Enable verbose output")


def handle_errors(func: Callable[..., Any]) -> Callable[..., Any]:
    """Turn library errors into a red message, a JSON summary on stderr and exit code 1."""

    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except GGEBenchError as e:
            summary = e.to_dict()
        except FileNotFoundError as e:
            summary = {"error": "FileNotFoundError", "message": str(e)}
        err_console.print(f"[bold red][FAIL] {escape(summary['message'])}[/bold red]")
        print(json.dumps(summary, default=str), file=sys.stderr)
        raise typer.Exit(code=1)

    return wrapper


def _setup(config: Path | None, verbose: bool, **overrides: Any) -> Pipeline:
    setup_logging("DEBUG" if verbose else "INFO")
    experiment: Experiment = load_experiment(config).with_overrides(**overrides)
    return Pipeline(experiment, verbose=verbose)


@app.command("gen-data")
@handle_errors
def gen_data(
    config: Path | None = ConfigOption,
    data_dir: Path | None = typer.Option(None, "--data-dir", help="Output directory"),
    seed: int | None = typer.Option(None, "--seed", help="Generator seed"),
    verbose: bool = VerboseOption,
):
    """Generate the train, test_ood and test_id splits plus a priors report."""
    console.print("[bold blue]Generating benchmark...[/bold blue]")
    pipeline = _setup(config, verbose, **{"generator.seed": seed})
    paths = pipeline.gen_data(data_dir)
    for split, path in paths.items():
        console.print(f"  {split}: {path}")
    console.print("[bold green][OK] Datasets written[/bold green]")


@app.command()
@handle_errors
def train(
    config: Path | None = ConfigOption,
    data_dir: Path | None = typer.Option(None, "--data-dir", help="Dataset directory"),
    run_dir: Path | None = typer.Option(None, "--run-dir", help="Run output directory"),
    seed: int | None = typer.Option(None, "--seed", help="Training seed"),
    variant: str | None = typer.Option(None, "--variant", help="Training variant"),
    schedule: str | None = typer.Option(None, "--schedule", help="iter or tog"),
    loss_family: str | None = typer.Option(None, "--loss-family", help="bce or sxce"),
    verbose: bool = VerboseOption,
):
    """Train one variant and write checkpoints, loss CSV and config snapshot."""
    pipeline = _setup(
        config,
        verbose,
        **{
            "training.seed": seed,
            "training.variant": variant,
            "training.schedule": schedule,
            "training.loss_family": loss_family,
        },
    )
    console.print(f"[bold blue]Training {pipeline.config.training.label}...[/bold blue]")
    record = pipeline.train(data_dir, run_dir)
    losses = ", ".join(f"{k}={v:.4f}" for k, v in record.final_losses().items())
    console.print(f"[bold green][OK] Training completed[/bold green] {losses}")


@app.command("eval")
@handle_errors
def eval_cmd(
    config: Path | None = ConfigOption,
    run_dir: Path | None = typer.Option(None, "--run-dir", help="Run directory"),
    dataset: Path | None = typer.Option(None, "--dataset", help="Dataset file"),
    data_dir: Path | None = typer.Option(None, "--data-dir", help="Use <data-dir>/test_ood.jsonl"),
    predictions: Path | None = typer.Option(None, "--predictions", help="Score a prediction dump"),
    threshold: float | None = typer.Option(None, "--threshold", help="Attention threshold"),
    cap: int | None = typer.Option(None, "--cap", help="Sensitive-set cap"),
    invert_grounding: bool = typer.Option(False, "--invert-grounding", help="Use 1 - mask"),
    verbose: bool = VerboseOption,
):
    """Evaluate the base model: accuracy, CGR, CGW and CGD."""
    pipeline = _setup(
        config, verbose, **{"evaluation.threshold": threshold, "evaluation.cap": cap}
    )
    if dataset is None and data_dir is not None:
        dataset = dataset_path(data_dir, "test_ood")
    report = pipeline.evaluate(run_dir, dataset, invert_grounding, predictions)
    row = {k: v for k, v in report.to_row().items() if not k.startswith("acc_type_")}
    console.print(render_table([row], title="Evaluation", precision=4))


@app.command()
@handle_errors
def sweep(
    config: Path | None = ConfigOption,
    run_dir: Path | None = typer.Option(None, "--run-dir", help="Run directory"),
    dataset: Path | None = typer.Option(None, "--dataset", help="Dataset file"),
    data_dir: Path | None = typer.Option(None, "--data-dir", help="Use <data-dir>/test_ood.jsonl"),
    predictions: Path | None = typer.Option(None, "--predictions", help="Score a prediction dump"),
    invert_grounding: bool = typer.Option(False, "--invert-grounding", help="Use 1 - mask"),
    verbose: bool = VerboseOption,
):
    """CGR, CGW and CGD across attention thresholds."""
    pipeline = _setup(config, verbose)
    if dataset is None and data_dir is not None:
        dataset = dataset_path(data_dir, "test_ood")
    reports = pipeline.sweep(run_dir, dataset, invert_grounding, predictions)
    rows = [{k: getattr(r, k) for k in ("threshold", "cap", "cgr", "cgw", "cgd")} for r in reports]
    console.print(render_table(rows, title="Threshold sweep"))


@app.command()
@handle_errors
def ablate(
    config: Path | None = ConfigOption,
    data_dir: Path | None = typer.Option(None, "--data-dir", help="Dataset directory"),
    out_dir: Path | None = typer.Option(None, "--out-dir", help="Report directory"),
    seed: int | None = typer.Option(None, "--seed", help="Base seed"),
    seeds: int | None = typer.Option(None, "--seeds", help="Seeds per variant"),
    jobs: int | None = typer.Option(None, "--jobs", help="Parallel workers"),
    verbose: bool = VerboseOption,
):
    """Train the ablation variants over several seeds and tabulate the results."""
    console.print("[bold blue]Running ablation...[/bold blue]")
    pipeline = _setup(
        config,
        verbose,
        **{"training.seed": seed, "ablation.seeds": seeds, "ablation.jobs": jobs},
    )
    stats = pipeline.ablate(out_dir, data_dir)
    console.print(render_table(stats.to_dict(orient="records"), title="Ablation"))
    console.print("[bold green][OK] Ablation completed[/bold green]")


@app.command()
@handle_errors
def report(
    run_dirs: list[Path] = typer.Argument(..., help="Run directories with reports/metrics.json"),
    config: Path | None = ConfigOption,
    out_dir: Path | None = typer.Option(None, "--out-dir", help="Report directory"),
    verbose: bool = VerboseOption,
):
    """Collect the evaluation reports of several runs."""
    pipeline = _setup(config, verbose)
    rows = pipeline.report(run_dirs, out_dir)
    columns = ("run", "variant", "accuracy", "cgr", "cgw", "cgd")
    console.print(render_table([{k: r[k] for k in columns} for r in rows], title="Runs"))


if __name__ == "__main__":
    app()
