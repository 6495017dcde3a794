"""Output utilities for the eraser CLI."""

import json
import re
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional

import pandas as pd
from rich.console import Console

from core import config as app_config


class OutputManager:
    """Manages output files and directories."""

    def __init__(self, base_dir: Optional[Path] = None):
        self.base_dir = Path(base_dir) if base_dir is not None else app_config.settings.output_dir
        self.console = Console()

    def get_timestamped_dirname(self, prefix: str) -> str:
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        return f"{self.slugify(prefix)}_{timestamp}"

    def run_directory(self, subdir: str, label: str, explicit: Optional[str] = None) -> Path:
        """``explicit`` when given, else ``<base>/<subdir>/<label>_<timestamp>``."""
        path = Path(explicit) if explicit else self.base_dir / subdir / self.get_timestamped_dirname(label)
        path.mkdir(parents=True, exist_ok=True)
        return path

    def save_json(self, data: Dict[str, Any], path: Path, quiet: bool = False) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(data, f, indent=2, ensure_ascii=False, sort_keys=True)
            f.write("\n")
        if not quiet:
            self.console.print(f"[green]✓[/green] Saved: {path}")
        return path

    def save_frame(self, frame: pd.DataFrame, path: Path, quiet: bool = False) -> Path:
        """CSV with a fixed float format so identical results give identical bytes."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, lineterminator="\n", float_format="%.10g")
        if not quiet:
            self.console.print(f"[green]✓[/green] Saved: {path}")
        return path

    def load_json(self, filepath: Path) -> Dict[str, Any]:
        with open(filepath, "r", encoding="utf-8") as f:
            return json.load(f)

    @staticmethod
    def slugify(value: Optional[str]) -> str:
        if not value:
            return "run"
        normalized = str(value).lower().strip()
        normalized = re.sub(r"[\s_']+", "-", normalized)
        normalized = re.sub(r"[^a-z0-9\-.]+", "-", normalized)
        normalized = re.sub(r"-{2,}", "-", normalized)
        normalized = normalized.strip("-.")
        return normalized or "run"
