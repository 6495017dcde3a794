"""Spacetime verification command."""

from pathlib import Path
from typing import List, Optional

import typer
from rich.console import Console
from rich.table import Table

from cli.utils.output import OutputManager
from cli.utils.validation import ExitCode, ValidationError, Validator, exit_code_for
from core.errors import EraserError
from core.spacetime import VerificationReport, build_scenario, list_scenarios, verify_scenario

console = Console()
validator = Validator()


def _print_report(report: VerificationReport, reference: dict) -> None:
    table = Table(title=f"Scenario {report.scenario}", show_header=True, header_style="bold magenta")
    table.add_column("Pair", style="cyan")
    table.add_column("Computed")
    table.add_column("Expected")
    table.add_column("Result")
    for check in report.checks:
        mark = "[green]PASS[/green]" if check.passed else "[red]FAIL[/red]"
        table.add_row(f"{check.a} / {check.b}", check.actual.value, check.expected.value, mark)
    console.print(table)

    if report.choice_speed is not None:
        console.print(f"Signal speed C_e → I_s would need: [bold]{report.choice_speed:.3g} c[/bold]")
    else:
        console.print("No signal from C_e can reach I_s")
    delay = report.choice_delay_after_interference
    if delay is not None and delay > 0:
        console.print(f"C_e lies {delay * 1e6:.1f} µs after I_s in the lab frame")
    if "i_value" in reference and "v_value" in reference:
        console.print(
            f"[dim]Published: I = {reference['i_value']:.3f} ± {reference.get('i_sigma', 0.0):.3f}, "
            f"V = {reference['v_value']:.3f} ± {reference.get('v_sigma', 0.0):.3f}[/dim]"
        )
    verdict = "[green]PASS[/green]" if report.passed else "[red]FAIL[/red]"
    console.print(f"Verdict: {verdict}\n")


def verify_spacetime(
    name: Optional[str] = typer.Argument(None, help="Bundled scenario name (e.g. vienna-II)"),
    scenario: Optional[str] = typer.Option(None, "--scenario", "-s", help="Scenario YAML file"),
    all_scenarios: bool = typer.Option(False, "--all", help="Verify every bundled scenario"),
    out: Optional[str] = typer.Option(None, "--out", "-o", help="Also write the reports as JSON"),
) -> None:
    """Classify a scenario's event pairs and compare them with its expected relations."""
    try:
        targets: List[str] = []
        if all_scenarios:
            targets = list_scenarios()
        elif scenario:
            targets = [str(validator.validate_file_exists(scenario))]
        elif name:
            targets = [name]
        else:
            raise ValidationError("give a scenario name, --scenario FILE or --all")

        reports = []
        for target in targets:
            geometry = build_scenario(target)
            report = verify_scenario(geometry)
            reference = dict(geometry.config.reference) if geometry.config is not None else {}
            _print_report(report, reference)
            reports.append(report)

        if out:
            OutputManager().save_json({"reports": [r.to_dict() for r in reports]}, Path(out))
        if not all(r.passed for r in reports):
            raise typer.Exit(ExitCode.VERIFICATION)

    except (ValidationError, EraserError) as e:
        console.print(f"[red]Error: {e}[/red]")
        raise typer.Exit(exit_code_for(e))
