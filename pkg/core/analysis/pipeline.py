"""Tag streams to physics quantities: offset, matching, tallies and fits."""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from core import config as app_config
from core.analysis.counting import SYSTEM_DETECTORS, CountTable, Estimate, tally_coincidences
from core.analysis.fringe import (
    FringeFit,
    FringeScan,
    average_visibility,
    background_rates,
    fit_fringe,
    fringe_scan,
    phase_difference,
    subtract_background,
)
from core.analysis.protocol import BlockingResult, blocking_probabilities
from core.errors import DataError
from core.timetag.coincidence import CoincidenceSet, OffsetEstimate, estimate_clock_offset, find_coincidences
from core.timetag.model import TimeTagStream

logger = logging.getLogger(__name__)

ERASURE_CONDITIONS = ("R", "L")
WELCHER_WEG_CONDITIONS = ("V", "H")
# tags of the system stream used for the offset histogram
OFFSET_MAX_TAGS = 200_000


@dataclass(frozen=True)
class MatchedRun:
    coincidences: CoincidenceSet
    table: CountTable
    offset: Optional[OffsetEstimate] = None

    def summary(self) -> Dict[str, object]:
        return {
            "offset_ps": self.coincidences.offset_ps,
            "offset_uncertainty_ps": self.offset.uncertainty_ps if self.offset else None,
            "offset_significance": self.offset.significance if self.offset else None,
            "window_ps": self.coincidences.window_ps,
            "coincidences": len(self.coincidences),
            "system_tags": len(self.coincidences.a),
            "environment_tags": len(self.coincidences.b),
        }


def match_run(
    system: TimeTagStream,
    environment: TimeTagStream,
    window_ps: Optional[int] = None,
    n_steps: Optional[int] = None,
    dwell: Optional[Sequence[float]] = None,
    center_ps: int = 0,
    offset_ps: Optional[int] = None,
) -> MatchedRun:
    """Recover the clock offset (unless given), pair the tags and tally them.

    The offset convention is t_sys - t_env; the search is centred on ``center_ps``.
    """
    settings = app_config.settings
    window_ps = int(window_ps or settings.window_ps)
    estimate = None
    if offset_ps is None:
        estimate = estimate_clock_offset(
            system,
            environment,
            search_span_ps=settings.offset_span_ps,
            bin_ps=settings.offset_bin_ps,
            center_ps=center_ps,
            max_tags=OFFSET_MAX_TAGS,
        )
        offset_ps = int(round(estimate.offset_ps))
    coincidences = find_coincidences(system, environment, window_ps, offset_ps)
    table = tally_coincidences(coincidences, n_steps=n_steps, dwell=dwell)
    logger.info("Matched %d coincidences at offset %d ps", len(coincidences), offset_ps)
    return MatchedRun(coincidences, table, estimate)


@dataclass(frozen=True)
class ScanAnalysis:
    scan: FringeScan
    fits: Tuple[FringeFit, ...]
    visibility: Estimate
    phase_shift: Estimate
    welcher_weg_fits: Tuple[FringeFit, ...] = ()
    skipped: Tuple[str, ...] = ()

    def fit(self, detector: str, condition: str) -> FringeFit:
        for candidate in self.fits + self.welcher_weg_fits:
            if candidate.detector == detector and candidate.condition == condition:
                return candidate
        raise KeyError((detector, condition))

    def to_dict(self) -> Dict[str, object]:
        return {
            "visibility": self.visibility.to_dict(),
            "phase_shift": self.phase_shift.to_dict(),
            "background_subtracted": self.scan.background_subtracted,
            "fits": [f.to_dict() for f in self.fits],
            "welcher_weg_fits": [f.to_dict() for f in self.welcher_weg_fits],
            "skipped": list(self.skipped),
        }


def analyze_scan(table: CountTable, phases: Sequence[float], subtract: bool = False) -> ScanAnalysis:
    """Fit the erasure fringes (required) and the welcher-weg ones (when fittable)."""
    conditions = ERASURE_CONDITIONS + WELCHER_WEG_CONDITIONS
    scan = fringe_scan(table, phases, conditions)
    if subtract:
        scan = subtract_background(scan, background_rates(table, conditions))

    fits = tuple(fit_fringe(scan, det, cond) for cond in ERASURE_CONDITIONS for det in SYSTEM_DETECTORS)
    extra: List[FringeFit] = []
    skipped: List[str] = []
    for cond in WELCHER_WEG_CONDITIONS:
        for det in SYSTEM_DETECTORS:
            try:
                extra.append(fit_fringe(scan, det, cond))
            except DataError as exc:
                logger.warning("Skipping %s|%s fit: %s", det, cond, exc)
                skipped.append(f"{det}|{cond}")

    by_key = {(f.detector, f.condition): f for f in fits}
    shift = phase_difference(by_key[("Det1", "R")], by_key[("Det1", "L")])
    return ScanAnalysis(scan, fits, average_visibility(fits), shift, tuple(extra), tuple(skipped))


@dataclass(frozen=True)
class RunAnalysis:
    """Everything ``analyze`` reports for one run directory or stream pair."""

    scan: MatchedRun
    fringes: ScanAnalysis
    blocking: Optional[BlockingResult] = None
    blocking_runs: Dict[str, MatchedRun] = field(default_factory=dict)

    @property
    def i_value(self) -> Optional[Estimate]:
        return self.blocking.i_value if self.blocking else None

    @property
    def v_value(self) -> Estimate:
        return self.fringes.visibility

    def to_dict(self) -> Dict[str, object]:
        return {
            "i": self.i_value.to_dict() if self.i_value else None,
            "v": self.v_value.to_dict(),
            "scan": {**self.scan.summary(), "table": self.scan.table.to_dict()},
            "fringes": self.fringes.to_dict(),
            "blocking": self.blocking.to_dict() if self.blocking else None,
            "blocking_runs": {name: run.summary() for name, run in self.blocking_runs.items()},
        }


def analyze_blocking(
    via_a: MatchedRun, via_b: MatchedRun, condition: str, subtract: bool = False
) -> BlockingResult:
    """``via_a`` is the run with path b blocked."""
    return blocking_probabilities(via_a.table, via_b.table, condition, subtract)


__all__ = [
    "ERASURE_CONDITIONS",
    "MatchedRun",
    "RunAnalysis",
    "ScanAnalysis",
    "WELCHER_WEG_CONDITIONS",
    "analyze_blocking",
    "analyze_scan",
    "match_run",
]
