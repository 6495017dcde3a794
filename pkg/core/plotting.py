"""Fringe and complementarity figures."""

from pathlib import Path
from typing import Iterable, Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")  # Non-interactive backend
import matplotlib.pyplot as plt
import numpy as np
import seaborn as sns

from core.analysis.fringe import FringeFit, FringeScan
from core.quantum.complementarity import ComplementarityFactors, bound_curve

sns.set_style("whitegrid")
plt.rcParams["font.size"] = 10
# fixed ids keep SVG output identical between runs
plt.rcParams["svg.hashsalt"] = "eraser-sim"

CONDITION_COLORS = {"R": "#1f9bb4", "L": "#d35400", "V": "#2c3e50", "H": "#7f8c8d"}
DETECTOR_MARKERS = {"Det1": "o", "Det2": "s"}


def save_figure(fig, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    metadata = {"Date": None} if path.suffix == ".svg" else None
    fig.tight_layout()
    fig.savefig(path, dpi=150, bbox_inches="tight", metadata=metadata)
    plt.close(fig)
    return path


def plot_fringes(
    scan: FringeScan,
    fits: Iterable[FringeFit],
    path: Path,
    conditions: Optional[Sequence[str]] = None,
    title: str = "Conditioned interference fringes",
) -> Path:
    """Counts with Poisson error bars per step, fitted sinusoids overlaid."""
    fits = list(fits)
    wanted = set(conditions) if conditions else {f.condition for f in fits}
    fig, ax = plt.subplots(figsize=(8, 5))
    dense = np.linspace(scan.phases.min(), scan.phases.max(), 400)
    for fit in fits:
        if fit.condition not in wanted:
            continue
        counts, variances = scan.series(fit.detector, fit.condition)
        color = CONDITION_COLORS.get(fit.condition, "#333333")
        label = f"{fit.detector} | {fit.condition}  V={fit.visibility.value:.3f}({fit.visibility.sigma * 1000:.0f})"
        ax.errorbar(
            scan.phases, counts, yerr=np.sqrt(np.maximum(variances, 0.0)),
            fmt=DETECTOR_MARKERS.get(fit.detector, "o"), color=color, ms=4, capsize=2,
            mfc="white" if fit.detector == "Det2" else color, label=label,
        )
        ax.plot(dense, fit.curve(dense), color=color, lw=1.2, ls="-" if fit.detector == "Det1" else "--")
    ax.set_xlabel("interferometer phase (rad)")
    ax.set_ylabel("coincidences per step" + (" (background subtracted)" if scan.background_subtracted else ""))
    ax.set_title(title, fontsize=12, fontweight="bold")
    ax.set_ylim(bottom=0)
    ax.legend(fontsize=8, loc="upper right")
    return save_figure(fig, path)


def plot_complementarity(
    points: Sequence[Tuple[float, float, float, float]],
    factors: ComplementarityFactors,
    path: Path,
    labels: Optional[Sequence[str]] = None,
    title: str = "Welcher-weg information versus visibility",
) -> Path:
    """(I, sigma_I, V, sigma_V) points over the corrected bound and the ideal circle."""
    fig, ax = plt.subplots(figsize=(6, 6))
    theta = np.linspace(0.0, np.pi / 2.0, 200)
    ax.plot(np.cos(theta), np.sin(theta), color="#95a5a6", ls=":", lw=1, label="I² + V² = 1")
    curve = np.array(bound_curve(factors))
    ax.plot(
        curve[:, 0], curve[:, 1], color="#2c3e50", lw=1.5,
        label=f"V = {factors.eta_v:.3f}·√(1 − (I/{factors.eta_i:.3f})²)",
    )
    if points:
        data = np.asarray(points, dtype=float)
        ax.errorbar(
            data[:, 0], data[:, 2], xerr=data[:, 1], yerr=data[:, 3],
            fmt="o", color="#c0392b", ms=5, capsize=2, label="measured",
        )
        for (i_value, _, v_value, _), label in zip(points, labels or []):
            ax.annotate(label, (i_value, v_value), textcoords="offset points", xytext=(5, 5), fontsize=7)
    ax.set_xlim(0, 1.05)
    ax.set_ylim(0, 1.05)
    ax.set_aspect("equal")
    ax.set_xlabel("welcher-weg information I")
    ax.set_ylabel("visibility V")
    ax.set_title(title, fontsize=12, fontweight="bold")
    ax.legend(fontsize=8, loc="lower left")
    return save_figure(fig, path)


__all__ = ["plot_complementarity", "plot_fringes", "save_figure"]
