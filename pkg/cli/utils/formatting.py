"""Console formatting for the eraser CLI."""

import logging
from numbers import Number
from typing import Any, Dict, List, Union

import pandas as pd
from rich.console import Console
from rich.logging import RichHandler
from rich.progress import Progress, SpinnerColumn, TextColumn, TimeElapsedColumn
from rich.table import Table

from core.analysis.counting import Estimate


def configure_logging(verbose: bool = False) -> None:
    """Route library logging through rich."""
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), rich_tracebacks=True, show_path=False)],
        force=True,
    )


def format_estimate(estimate: Estimate, digits: int = 3) -> str:
    """Value with its uncertainty in the last digits, e.g. 0.955(7)."""
    scale = 10**digits
    sigma_digits = max(1, int(round(estimate.sigma * scale)))
    return f"{estimate.value:.{digits}f}({sigma_digits})"


def format_value(value: Any) -> str:
    if isinstance(value, Estimate):
        return format_estimate(value)
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


class Formatter:
    """Rich output for run, analysis and sweep results."""

    def __init__(self, console: Console = None):
        self.console = console or Console()

    def print_success(self, message: str) -> None:
        self.console.print(f"[green]✓[/green] {message}")

    def print_warning(self, message: str) -> None:
        self.console.print(f"[yellow]⚠[/yellow] {message}")

    def create_progress(self) -> Progress:
        return Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            TimeElapsedColumn(),
            console=self.console,
        )

    def print_table(self, data: Union[List[Dict[str, Any]], pd.DataFrame], title: str = "") -> None:
        """Rows as a table; numeric columns are right-aligned."""
        frame = data if isinstance(data, pd.DataFrame) else pd.DataFrame(data)
        if frame.empty:
            self.print_warning("Nothing to display")
            return

        table = Table(title=title, show_header=True, header_style="bold magenta")
        for column in frame.columns:
            numeric = all(isinstance(v, Number) and not isinstance(v, bool) for v in frame[column])
            table.add_column(str(column).replace("_", " "), justify="right" if numeric else "left")
        for row in frame.itertuples(index=False):
            table.add_row(*[format_value(value) for value in row])
        self.console.print(table)

    def print_summary(self, stats: Dict[str, Any], title: str = "Summary") -> None:
        table = Table(title=title, show_header=False)
        table.add_column("Quantity", style="cyan")
        table.add_column("Value", style="green", justify="right")
        for key, value in stats.items():
            table.add_row(key.replace("_", " "), format_value(value))
        self.console.print(table)
