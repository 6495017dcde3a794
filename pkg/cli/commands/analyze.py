"""Analyze command: coincidences, fringes and welcher-weg information from tag files."""

from pathlib import Path
from typing import Dict, List, Optional, Tuple

import pandas as pd
import typer
from rich.console import Console

from cli.utils.formatting import Formatter, format_estimate
from cli.utils.output import OutputManager
from cli.utils.runs import MANIFEST, load_run, manifest_config
from cli.utils.validation import ValidationError, Validator, exit_code_for
from core.analysis.pipeline import RunAnalysis, analyze_blocking, analyze_scan, match_run
from core.errors import EraserError
from core.experiment.config import ExperimentConfig, InterferometerSettings
from core.plotting import plot_complementarity, plot_fringes
from core.quantum.complementarity import complementarity_bound, derive_correction_factors
from core.timetag.io import read_stream, write_coincidences

console = Console()
formatter = Formatter()
validator = Validator()


def _sweep_points(path: Path) -> Tuple[List[Tuple[float, float, float, float]], List[str]]:
    frame = pd.read_csv(path)
    missing = {"drive", "i", "sigma_i", "v", "sigma_v"} - set(frame.columns)
    if missing:
        raise ValidationError(f"{path} lacks columns: {', '.join(sorted(missing))}")
    points = list(frame[["i", "sigma_i", "v", "sigma_v"]].itertuples(index=False, name=None))
    return points, [f"{d:.2f}" for d in frame["drive"]]


def _phases(config: Optional[ExperimentConfig], record: Optional[Dict], n_steps: int) -> List[float]:
    if record is not None:
        return [float(p) for p in record["phases"]]
    ifm = config.interferometer if config is not None else InterferometerSettings()
    return [ifm.phase0 + k * ifm.rad_per_step for k in range(n_steps)]


def analyze(
    run_dir: Optional[str] = typer.Argument(None, help="Run directory written by 'simulate'"),
    system: Optional[str] = typer.Option(None, "--system", help="System-lab tag file (instead of a run directory)"),
    environment: Optional[str] = typer.Option(None, "--environment", help="Environment-lab tag file"),
    window_ps: Optional[int] = typer.Option(None, "--window-ps", "-w", help="Full coincidence window in ps"),
    offset_ps: Optional[int] = typer.Option(None, "--offset-ps", help="Use this clock offset instead of searching"),
    subtract: Optional[bool] = typer.Option(
        None, "--subtract-background/--raw", help="Subtract accidentals (default: from the config)"
    ),
    sweep_csv: Optional[str] = typer.Option(None, "--sweep-csv", help="Overlay sweep points on the complementarity plot"),
    out: Optional[str] = typer.Option(None, "--out", "-o", help="Output directory (default: the run directory)"),
) -> None:
    """Recover the clock offset, match coincidences and fit the conditioned fringes."""
    try:
        window_ps = validator.validate_window(window_ps)
        manifest: Dict = {}
        config: Optional[ExperimentConfig] = None
        scan_record = None
        if run_dir:
            root = validator.validate_run_dir(run_dir)
            output_manager = OutputManager()
            manifest = output_manager.load_json(root / MANIFEST)
            config = manifest_config(root)
            scan_run = load_run(root, manifest, "scan")
            sys_stream, env_stream, scan_record = scan_run.system, scan_run.environment, scan_run.record
        elif system and environment:
            root = None
            output_manager = OutputManager()
            sys_stream = read_stream(validator.validate_file_exists(system))
            env_stream = read_stream(validator.validate_file_exists(environment))
        else:
            raise ValidationError("give a run directory or both --system and --environment")

        window_ps = window_ps or (config.analysis.window_ps if config else None)
        subtract = subtract if subtract is not None else bool(config and config.analysis.subtract_background)
        center = int(manifest.get("nominal_offset_ps", 0))
        out_dir = output_manager.run_directory("analysis", "streams", explicit=out or (str(root) if root else None))

        console.print("\n[bold cyan]Analyzing coincidences[/bold cyan]\n")
        with formatter.create_progress() as progress:
            task = progress.add_task("Matching scan...", total=None)
            n_steps = len(scan_record["steps"]) if scan_record else None
            scan = match_run(
                sys_stream, env_stream, window_ps,
                n_steps=n_steps, dwell=scan_record["dwell"] if scan_record else None,
                center_ps=center, offset_ps=offset_ps,
            )
            progress.update(task, description="Fitting fringes...")
            fringes = analyze_scan(scan.table, _phases(config, scan_record, scan.table.n_steps), subtract)

            blocking = None
            blocking_runs = {}
            if root is not None and {"blocked-a", "blocked-b"} <= set(manifest.get("runs", {})):
                progress.update(task, description="Matching blocking runs...")
                for name in ("blocked-a", "blocked-b"):
                    run = load_run(root, manifest, name)
                    blocking_runs[name] = match_run(
                        run.system, run.environment, window_ps,
                        n_steps=len(run.record["steps"]), dwell=run.record["dwell"], center_ps=center,
                    )
                condition = config.analysis.blocking_condition
                blocking = analyze_blocking(blocking_runs["blocked-b"], blocking_runs["blocked-a"], condition, subtract)
            progress.update(task, description="Done")

        result = RunAnalysis(scan, fringes, blocking, blocking_runs)
        write_coincidences(scan.coincidences, out_dir / "coincidences.csv")
        output_manager.save_frame(fringes.scan.to_frame(), out_dir / "fringes.csv", quiet=True)
        plot_fringes(fringes.scan, fringes.fits, out_dir / "fringes.svg", conditions=("R", "L"))
        if fringes.welcher_weg_fits:
            plot_fringes(
                fringes.scan, fringes.welcher_weg_fits, out_dir / "fringes-welcher-weg.svg",
                conditions=("V", "H"), title="Welcher-weg conditioned counts",
            )

        report = {"scenario": manifest.get("scenario"), "seed": manifest.get("seed"), **result.to_dict()}
        if config is not None:
            factors = derive_correction_factors(
                config.state.v_hv, config.state.v_coh, config.chain.pbs_extinction, config.chain.eom_extinction
            )
            report["bound"] = {"eta_i": factors.eta_i, "eta_v": factors.eta_v}
            points: List[Tuple[float, float, float, float]] = []
            labels: List[str] = []
            if result.i_value is not None:
                points.append((result.i_value.value, result.i_value.sigma, result.v_value.value, result.v_value.sigma))
                labels.append("run")
                if result.i_value.value <= factors.eta_i:
                    report["bound"]["v_max"] = complementarity_bound(result.i_value.value, factors)
            if sweep_csv:
                sweep_points, sweep_labels = _sweep_points(validator.validate_file_exists(sweep_csv))
                points += sweep_points
                labels += sweep_labels
            plot_complementarity(points, factors, out_dir / "complementarity.svg", labels=labels)
            report["reference"] = dict(config.geometry().config.reference)
        output_manager.save_json(report, out_dir / "report.json")

        summary = {
            "clock_offset_ps": scan.coincidences.offset_ps,
            "coincidences": len(scan.coincidences),
            "background_subtracted": fringes.scan.background_subtracted,
            "visibility_V": format_estimate(result.v_value),
            "phase_shift_R_L_rad": format_estimate(fringes.phase_shift, 2),
        }
        if blocking is not None:
            summary[f"P(a|{blocking.condition})"] = format_estimate(blocking.p_a)
            summary[f"P(b|{blocking.condition})"] = format_estimate(blocking.p_b)
            summary["welcher_weg_I"] = format_estimate(blocking.i_value)
        formatter.print_summary(summary, title="Analysis")
        for skipped in fringes.skipped:
            formatter.print_warning(f"No fit for {skipped}")
        formatter.print_success(f"Results written to {out_dir}")

    except (ValidationError, EraserError) as e:
        console.print(f"[red]Error: {e}[/red]")
        raise typer.Exit(exit_code_for(e))
