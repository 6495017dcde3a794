"""Coincidence counting, fringe fits and the welcher-weg protocols."""

from core.analysis.counting import (
    CONDITIONS,
    Condition,
    CountTable,
    Estimate,
    conditional_probabilities,
    probabilities_from_counts,
    tally_coincidences,
)
from core.analysis.fringe import (
    FringeFit,
    FringeScan,
    average_visibility,
    fit_fringe,
    fringe_scan,
    subtract_background,
)
from core.analysis.pipeline import RunAnalysis, ScanAnalysis, analyze_scan, match_run
from core.analysis.protocol import (
    BlockingResult,
    ComplementarityPoint,
    blocking_probabilities,
    complementarity_sweep,
    path_probabilities_via_blocking,
)

__all__ = [
    "RunAnalysis",
    "ScanAnalysis",
    "analyze_scan",
    "match_run",
    "BlockingResult",
    "CONDITIONS",
    "ComplementarityPoint",
    "Condition",
    "CountTable",
    "Estimate",
    "FringeFit",
    "FringeScan",
    "average_visibility",
    "blocking_probabilities",
    "complementarity_sweep",
    "conditional_probabilities",
    "fit_fringe",
    "fringe_scan",
    "path_probabilities_via_blocking",
    "probabilities_from_counts",
    "subtract_background",
    "tally_coincidences",
]
