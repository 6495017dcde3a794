"""Main CLI entry point using Typer."""

from typing import Optional

import typer
from rich.console import Console

from cli.commands import analyze, report, simulate, sweep, verify_spacetime
from cli.utils.formatting import configure_logging

__version__ = "0.1.0"

app = typer.Typer(
    name="eraser-cli",
    help="Quantum eraser under Einstein locality: simulate, analyze and verify",
    no_args_is_help=False,
    rich_markup_mode="rich",
    add_completion=False,
    invoke_without_command=True,
)

console = Console()

app.command(name="simulate")(simulate.simulate)
app.command(name="analyze")(analyze.analyze)
app.command(name="sweep")(sweep.sweep)
app.command(name="verify-spacetime")(verify_spacetime.verify_spacetime)
app.command(name="report")(report.report)


@app.command()
def quickref() -> None:
    """Show quick reference guide with examples."""
    from rich.panel import Panel
    from rich.table import Table

    help_text = """
[bold cyan]Quantum Eraser Quick Reference[/bold cyan]

[bold]Basic workflow:[/bold]
  1. Verify:    eraser-cli verify-spacetime vienna-II
  2. Simulate:  eraser-cli simulate --config configs/vienna-II.yaml --out runs/v2
  3. Analyze:   eraser-cli analyze runs/v2
  4. Report:    eraser-cli report runs/v2/report.json

[bold]Tips:[/bold]
  • Every run is reproducible from its manifest.json and seed
  • --seed overrides the config seed without editing the file
  • Environment: ERASER_OUTPUT_DIR, ERASER_WINDOW_PS, ERASER_SCENARIO_DIR
    """
    console.print(Panel(help_text.expandtabs(2), title="Quick Reference", border_style="cyan"))

    table = Table(title="Common Examples", show_header=True, header_style="bold magenta")
    table.add_column("Command", style="cyan", width=48)
    table.add_column("Description", style="white")
    table.add_row("eraser-cli verify-spacetime --all", "Check every bundled scenario's causal relations")
    table.add_row("eraser-cli verify-spacetime --scenario my-lab.yaml", "Check a custom geometry")
    table.add_row("eraser-cli simulate -c configs/canaries-II.yaml --seed 7", "Simulate with a different seed")
    table.add_row("eraser-cli analyze runs/v2 --subtract-background", "Fringes with accidentals removed")
    table.add_row("eraser-cli sweep -c configs/vienna-sweep.yaml", "I versus V over the EOM drive")
    table.add_row("eraser-cli analyze runs/v2 --sweep-csv sweep.csv", "Overlay sweep points on the bound")
    console.print(table)
    console.print("\n[dim]For detailed help: eraser-cli [command] --help[/dim]")


def _version_callback(value: bool) -> None:
    if value:
        console.print(f"eraser-cli {__version__}")
        raise typer.Exit()


@app.callback()
def main(
    ctx: typer.Context,
    version: Optional[bool] = typer.Option(
        None, "--version", callback=_version_callback, is_eager=True, help="Show the version and exit"
    ),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log progress of the library code"),
) -> None:
    """Quantum eraser simulator and analysis toolkit."""
    configure_logging(verbose)
    if ctx.invoked_subcommand is None:
        console.print(ctx.get_help())
        console.print("\n[dim]Start with 'eraser-cli quickref'[/dim]")
        raise typer.Exit()


if __name__ == "__main__":
    app()
