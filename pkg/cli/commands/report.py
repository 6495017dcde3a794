"""Report command: analysis or sweep JSON to PDF."""

from pathlib import Path
from typing import Optional

import typer
from rich.console import Console

from cli.utils.formatting import Formatter
from cli.utils.output import OutputManager
from cli.utils.validation import ValidationError, Validator, exit_code_for
from core.errors import EraserError
from core.pdf_report_generator import generate_pdf_report

console = Console()
validator = Validator()
formatter = Formatter(console)


def report(
    input: str = typer.Argument(..., help="report.json from 'analyze' or sweep.json from 'sweep'"),
    output: Optional[str] = typer.Option(None, "--output", "-o", help="Output PDF (default: next to the input)"),
    title: str = typer.Option("Quantum Eraser Report", "--title", "-t", help="Report title"),
) -> None:
    """Generate a PDF report from analysis or sweep results."""
    try:
        input_file = validator.validate_file_exists(input)
        output_manager = OutputManager()
        output_path = Path(output) if output else input_file.with_suffix(".pdf")

        console.print("\n[bold cyan]Generating PDF Report[/bold cyan]")
        console.print(f"Input: {input}")
        console.print(f"Output: {output_path}\n")

        data = output_manager.load_json(input_file)
        output_path = generate_pdf_report(data, output_path, title=title)

        file_size = output_path.stat().st_size / 1024
        formatter.print_summary(
            {"input": input, "output": str(output_path), "size": f"{file_size:.1f} KB", "title": title},
            title="Report",
        )
        formatter.print_success("Report generated")

    except (ValidationError, EraserError) as e:
        console.print(f"[red]Error: {e}[/red]")
        raise typer.Exit(exit_code_for(e))
    except ValueError as e:
        console.print(f"[red]Error: cannot read {input}: {e}[/red]")
        raise typer.Exit(exit_code_for(e))
