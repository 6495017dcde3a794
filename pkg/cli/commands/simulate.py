"""Simulate command: configured runs to tag files plus a manifest."""

from dataclasses import replace
from pathlib import Path
from typing import Optional

import typer
from rich.console import Console

from cli.utils.formatting import Formatter
from cli.utils.output import OutputManager
from cli.utils.runs import MANIFEST, simulate_to_disk
from cli.utils.validation import ExitCode, ValidationError, Validator, exit_code_for
from core.errors import EraserError
from core.experiment.config import BlockingSettings, load_experiment_config

console = Console()
formatter = Formatter()
validator = Validator()


def simulate(
    config: str = typer.Option(..., "--config", "-c", help="Experiment config (YAML, JSON or a run manifest)"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Override the root seed"),
    out: Optional[str] = typer.Option(None, "--out", "-o", help="Output directory (default: outputs/runs/<name>_<time>)"),
    dwell: Optional[float] = typer.Option(None, "--dwell", help="Override the per-step dwell in seconds"),
    steps: Optional[int] = typer.Option(None, "--steps", help="Override the number of piezo steps"),
    blocking_dwell: Optional[float] = typer.Option(
        None, "--blocking-dwell", help="Override (or enable) the blocking runs' dwell in seconds"
    ),
) -> None:
    """Simulate the scan (and blocking runs) of an experiment config."""
    try:
        experiment = load_experiment_config(validator.validate_file_exists(config))
        if seed is not None:
            experiment = experiment.with_seed(seed)
        if dwell is not None or steps is not None:
            schedule = replace(
                experiment.schedule,
                dwell=dwell if dwell is not None else experiment.schedule.dwell,
                steps=steps if steps is not None else experiment.schedule.steps,
            )
            experiment = replace(experiment, schedule=schedule)
        if blocking_dwell is not None:
            experiment = replace(experiment, blocking=BlockingSettings(dwell=blocking_dwell))

        output_manager = OutputManager()
        label = experiment.name or Path(config).stem
        run_dir = output_manager.run_directory("runs", label, explicit=out or experiment.output_dir)

        console.print("\n[bold cyan]Simulating quantum eraser run[/bold cyan]")
        console.print(f"Scenario: {experiment.scenario}   Seed: {experiment.seed}\n")
        with formatter.create_progress() as progress:
            task = progress.add_task("Simulating...", total=None)
            manifest = simulate_to_disk(experiment, run_dir, progress=progress, task=task)
            progress.update(task, description="Done")

        output_manager.save_json(manifest, run_dir / MANIFEST)
        rows = [
            {
                "run": name,
                "blocked": record["blocked"],
                "duration_s": f"{sum(record['dwell']):g}",
                "system_tags": record["system_tags"],
                "environment_tags": record["environment_tags"],
            }
            for name, record in manifest["runs"].items()
        ]
        formatter.print_table(rows, title="Simulated runs")
        formatter.print_success(f"Run written to {run_dir}")

    except (ValidationError, EraserError) as e:
        console.print(f"[red]Error: {e}[/red]")
        raise typer.Exit(exit_code_for(e))
    except OSError as e:
        console.print(f"[red]Error: {e}[/red]")
        raise typer.Exit(ExitCode.DATA)
