"""Blocking-based welcher-weg measurement and the complementarity sweep."""

import logging
import math
from dataclasses import dataclass, replace
from enum import IntEnum
from typing import TYPE_CHECKING, Dict, List, Optional, Protocol, Sequence, Tuple

import pandas as pd

from core.analysis.counting import (
    SYSTEM_DETECTORS,
    Condition,
    CountTable,
    Estimate,
    minus_port_condition,
    resolve_condition,
)
from core.analysis.fringe import (
    FringeFit,
    average_visibility,
    background_rates,
    fit_fringe,
    fringe_scan,
    subtract_background,
)
from core.errors import DomainError, InsufficientDataError
from core.instrument.config import EomMode
from core.instrument.schedule import InterferometerSchedule
from core.quantum.interferometer import Blocked
from core.quantum.optics import chain_basis

if TYPE_CHECKING:
    from core.experiment.config import ExperimentConfig

logger = logging.getLogger(__name__)


class CountRunner(Protocol):
    def count(
        self, config: "ExperimentConfig", schedule: InterferometerSchedule, run_key: Tuple[int, ...]
    ) -> CountTable: ...


class RunKind(IntEnum):
    SCAN = 0
    BLOCK_PATH_A = 1
    BLOCK_PATH_B = 2


@dataclass(frozen=True)
class BlockingResult:
    condition: str
    p_a: Estimate
    p_b: Estimate
    i_value: Estimate
    counts_a: float
    counts_b: float
    background_subtracted: bool = False

    def to_dict(self) -> Dict[str, object]:
        return {
            "condition": self.condition,
            "p_a": self.p_a.to_dict(),
            "p_b": self.p_b.to_dict(),
            "i": self.i_value.to_dict(),
            "counts_a": self.counts_a,
            "counts_b": self.counts_b,
            "background_subtracted": self.background_subtracted,
        }


def _conditioned_total(table: CountTable, cond: Condition, subtract: bool) -> Tuple[float, float]:
    """Summed conditioned coincidences over both detectors and their variance."""
    raw = float(table.conditioned(cond).sum())
    if not subtract:
        return raw, raw
    background = float(table.conditioned_accidentals(cond).sum())
    return max(raw - background, 0.0), raw + background


def blocking_probabilities(
    via_a: CountTable, via_b: CountTable, condition, subtract_background: bool = False
) -> BlockingResult:
    """Path probabilities from a path-b-blocked run (``via_a``) and a path-a-blocked run (``via_b``).

    Both runs must share the same dwell.
    """
    cond = resolve_condition(condition)
    n_a, var_a = _conditioned_total(via_a, cond, subtract_background)
    n_b, var_b = _conditioned_total(via_b, cond, subtract_background)
    total = n_a + n_b
    if total <= 0:
        raise InsufficientDataError(f"no coincidences conditioned on {cond.name} in the blocking runs")
    sigma_p = math.sqrt(n_b**2 * var_a + n_a**2 * var_b) / total**2
    p_a, p_b = n_a / total, n_b / total
    return BlockingResult(
        condition=cond.name,
        p_a=Estimate(p_a, sigma_p),
        p_b=Estimate(p_b, sigma_p),
        i_value=Estimate(abs(p_a - p_b), 2.0 * sigma_p),
        counts_a=n_a,
        counts_b=n_b,
        background_subtracted=subtract_background,
    )


def blocking_schedules(dwell: float, contrast: float = 1.0) -> Tuple[InterferometerSchedule, InterferometerSchedule]:
    """(path b blocked, path a blocked) constant schedules."""
    base = InterferometerSchedule.constant(0.0, dwell, contrast=contrast)
    return base.with_blocked(Blocked.PATH_B), base.with_blocked(Blocked.PATH_A)


def path_probabilities_via_blocking(
    runner: CountRunner,
    config: "ExperimentConfig",
    condition=None,
    dwell: Optional[float] = None,
    subtract_background: Optional[bool] = None,
    run_key: Tuple[int, ...] = (),
) -> BlockingResult:
    """Run both blocking configurations and normalize conditioned counts across them."""
    cond = resolve_condition(condition if condition is not None else config.analysis.blocking_condition)
    dwell = dwell if dwell is not None else config.blocking.dwell
    subtract = config.analysis.subtract_background if subtract_background is None else subtract_background
    block_b, block_a = blocking_schedules(dwell, config.interferometer.contrast)
    via_a = runner.count(config, block_b, run_key + (RunKind.BLOCK_PATH_B,))
    via_b = runner.count(config, block_a, run_key + (RunKind.BLOCK_PATH_A,))
    result = blocking_probabilities(via_a, via_b, cond, subtract)
    logger.info("Blocking %s: P(a) = %s, I = %s", cond.name, result.p_a, result.i_value)
    return result


def fit_scan(
    table: CountTable,
    phases: Sequence[float],
    conditions: Sequence[str],
    subtract: bool = False,
) -> Tuple[List[FringeFit], bool]:
    """Fit both system detectors under each condition."""
    names = [resolve_condition(c).name for c in conditions]
    scan = fringe_scan(table, phases, names)
    if subtract:
        scan = subtract_background(scan, background_rates(table, names))
    fits = [fit_fringe(scan, det, name) for name in names for det in SYSTEM_DETECTORS]
    return fits, scan.background_subtracted


@dataclass(frozen=True)
class ComplementarityPoint:
    drive: float
    i_value: Estimate
    v_value: Estimate
    latitude_deg: float

    def to_row(self) -> Dict[str, float]:
        return {
            "drive": self.drive,
            "i": self.i_value.value,
            "sigma_i": self.i_value.sigma,
            "v": self.v_value.value,
            "sigma_v": self.v_value.sigma,
            "latitude_deg": self.latitude_deg,
        }


def complementarity_sweep(
    drive_fractions: Sequence[float], runner: CountRunner, config: "ExperimentConfig"
) -> List[ComplementarityPoint]:
    """Blocking pair and phase scan at each held EOM drive.

    Each point conditions on the minus port; points are independent runs
    with their own derived run keys.
    """
    fractions = [float(f) for f in drive_fractions]
    if any(not 0.0 <= f <= 1.0 for f in fractions):
        raise DomainError("drive fractions must lie in [0, 1]")
    sweep = config.sweep
    points: List[ComplementarityPoint] = []
    for index, fraction in enumerate(fractions):
        held = replace(config, eom=replace(config.eom, mode=EomMode.STATIC, drive=fraction))
        cond = minus_port_condition(1 if fraction != 0.0 else 0)
        key = (100 + index,)

        blocking = path_probabilities_via_blocking(
            runner, held, cond, dwell=sweep.blocking_dwell, run_key=key
        )
        schedule = InterferometerSchedule.scan(
            sweep.steps, config.interferometer.rad_per_step, sweep.dwell, contrast=config.interferometer.contrast
        )
        table = runner.count(held, schedule, key + (RunKind.SCAN,))
        fits, _ = fit_scan(table, [s.phase for s in schedule.steps], [cond.name], held.analysis.subtract_background)
        visibility = average_visibility(fits)
        latitude = chain_basis(held.chain.at(fraction)).latitude_deg("minus")
        point = ComplementarityPoint(fraction, blocking.i_value, visibility, latitude)
        logger.info("Sweep drive %.3f: I = %s, V = %s", fraction, point.i_value, point.v_value)
        points.append(point)
    return points


def points_frame(points: Sequence[ComplementarityPoint]) -> pd.DataFrame:
    return pd.DataFrame([p.to_row() for p in points], columns=["drive", "i", "sigma_i", "v", "sigma_v", "latitude_deg"])


__all__ = [
    "BlockingResult",
    "ComplementarityPoint",
    "CountRunner",
    "RunKind",
    "blocking_probabilities",
    "blocking_schedules",
    "complementarity_sweep",
    "fit_scan",
    "path_probabilities_via_blocking",
    "points_frame",
]
