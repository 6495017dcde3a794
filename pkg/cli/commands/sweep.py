"""Sweep command: welcher-weg information versus visibility over the EOM drive."""

from dataclasses import replace
from pathlib import Path
from typing import Optional

import typer
from rich.console import Console

from cli.utils.formatting import Formatter, format_estimate
from cli.utils.output import OutputManager
from cli.utils.validation import ValidationError, Validator, exit_code_for
from core.analysis.protocol import complementarity_sweep, points_frame
from core.errors import EraserError
from core.experiment.config import load_experiment_config
from core.experiment.runner import ExperimentRunner
from core.plotting import plot_complementarity
from core.quantum.complementarity import complementarity_bound, derive_correction_factors, predicted_point

console = Console()
formatter = Formatter()
validator = Validator()


def sweep(
    config: str = typer.Option(..., "--config", "-c", help="Experiment config (YAML, JSON or a run manifest)"),
    fractions: Optional[str] = typer.Option(None, "--fractions", "-f", help="Comma-separated drive fractions in [0, 1]"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Override the root seed"),
    dwell: Optional[float] = typer.Option(None, "--dwell", help="Per-step dwell of each phase scan (s)"),
    blocking_dwell: Optional[float] = typer.Option(None, "--blocking-dwell", help="Dwell of each blocking run (s)"),
    out: Optional[str] = typer.Option(None, "--out", "-o", help="Output directory (default: outputs/sweeps/<name>_<time>)"),
) -> None:
    """Hold the EOM at each drive fraction and measure (I, V) from blocking runs and a phase scan."""
    try:
        experiment = load_experiment_config(validator.validate_file_exists(config))
        if seed is not None:
            experiment = experiment.with_seed(seed)
        settings = experiment.sweep
        if dwell is not None:
            settings = replace(settings, dwell=dwell)
        if blocking_dwell is not None:
            settings = replace(settings, blocking_dwell=blocking_dwell)
        values = validator.validate_fractions(fractions) or list(settings.fractions)
        experiment = replace(experiment, sweep=replace(settings, fractions=tuple(values)))

        output_manager = OutputManager()
        out_dir = output_manager.run_directory("sweeps", experiment.name or Path(config).stem, explicit=out)

        console.print(f"\n[bold cyan]Complementarity sweep over {len(values)} drive fractions[/bold cyan]\n")
        with formatter.create_progress() as progress:
            task = progress.add_task("Running sweep...", total=None)
            points = complementarity_sweep(values, ExperimentRunner(), experiment)
            progress.update(task, description="Done")

        factors = derive_correction_factors(
            experiment.state.v_hv, experiment.state.v_coh,
            experiment.chain.pbs_extinction, experiment.chain.eom_extinction,
        )
        state = experiment.state.build()
        rows = []
        records = []
        for point in points:
            predicted = predicted_point(state, experiment.chain.at, point.drive, experiment.interferometer.contrast)
            v_max = complementarity_bound(min(point.i_value.value, factors.eta_i), factors)
            records.append(
                {
                    **point.to_row(),
                    "predicted_i": predicted.i_value,
                    "predicted_v": predicted.v_value,
                    "bound_v": v_max,
                }
            )
            rows.append(
                {
                    "drive": f"{point.drive:.3f}",
                    "latitude": f"{point.latitude_deg:.1f}°",
                    "I": format_estimate(point.i_value),
                    "V": format_estimate(point.v_value),
                    "bound_V": f"{v_max:.3f}",
                    "I²+V²": f"{point.i_value.value**2 + point.v_value.value**2:.3f}",
                }
            )

        output_manager.save_frame(points_frame(points), out_dir / "sweep.csv")
        output_manager.save_json(
            {
                "config": experiment.to_dict(),
                "seed": experiment.seed,
                "bound": {"eta_i": factors.eta_i, "eta_v": factors.eta_v},
                "points": records,
            },
            out_dir / "sweep.json",
        )
        plot_complementarity(
            [(p.i_value.value, p.i_value.sigma, p.v_value.value, p.v_value.sigma) for p in points],
            factors,
            out_dir / "complementarity.svg",
            labels=[f"{p.drive:.2f}" for p in points],
        )
        formatter.print_table(rows, title="Complementarity sweep")
        formatter.print_success(f"Sweep written to {out_dir}")

    except (ValidationError, EraserError) as e:
        console.print(f"[red]Error: {e}[/red]")
        raise typer.Exit(exit_code_for(e))
