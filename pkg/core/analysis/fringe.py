"""Fringe scans, sinusoid fits and background subtraction."""

import logging
import math
from dataclasses import dataclass, replace
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.optimize import curve_fit

from core.analysis.counting import SYSTEM_DETECTORS, CountTable, Estimate, resolve_condition
from core.errors import DataError, FitError, InsufficientDataError
from core.quantum.complementarity import visibility_from_extrema

logger = logging.getLogger(__name__)

MIN_POINTS = 6
Key = Tuple[str, str]


@dataclass(frozen=True, eq=False)
class FringeScan:
    """Per-step conditioned counts keyed by (system detector, condition name)."""

    steps: np.ndarray
    phases: np.ndarray
    counts: Mapping[Key, np.ndarray]
    variances: Mapping[Key, np.ndarray]
    dwell: np.ndarray
    background_subtracted: bool = False

    def __post_init__(self) -> None:
        steps = np.asarray(self.steps)
        if len(np.unique(steps)) != len(steps):
            raise DataError("scanner steps must be unique")
        n = len(steps)
        for key, values in self.counts.items():
            if len(values) != n or len(self.variances[key]) != n:
                raise DataError(f"counts for {key} do not match the {n} steps")
            if np.any(np.asarray(values) < 0):
                raise DataError(f"negative counts for {key}")

    def __len__(self) -> int:
        return len(self.steps)

    def series(self, detector: str, condition) -> Tuple[np.ndarray, np.ndarray]:
        key = (detector, resolve_condition(condition).name)
        if key not in self.counts:
            raise DataError(f"no counts for detector {detector} under condition {key[1]}")
        return np.asarray(self.counts[key], dtype=float), np.asarray(self.variances[key], dtype=float)

    def to_frame(self) -> pd.DataFrame:
        data = {"step": self.steps, "phase_rad": self.phases, "dwell_s": self.dwell}
        for (det, cond), values in sorted(self.counts.items()):
            data[f"{det}|{cond}"] = values
        return pd.DataFrame(data)


def fringe_scan(table: CountTable, phases: Sequence[float], conditions: Iterable[str] = ("R", "L", "V", "H")) -> FringeScan:
    """Build a scan from a tally; raw counts have Poisson variances."""
    phases = np.asarray(phases, dtype=float)
    if len(phases) != table.n_steps:
        raise DataError(f"{len(phases)} phases for {table.n_steps} steps")
    counts: Dict[Key, np.ndarray] = {}
    for name in conditions:
        cond = resolve_condition(name)
        conditioned = table.conditioned(cond)
        for i, det in enumerate(SYSTEM_DETECTORS):
            counts[(det, cond.name)] = conditioned[:, i].astype(float)
    variances = {key: values.copy() for key, values in counts.items()}
    return FringeScan(np.arange(table.n_steps), phases, counts, variances, table.dwell.copy())


def background_rates(table: CountTable, conditions: Iterable[str] = ("R", "L", "V", "H")) -> Dict[Key, np.ndarray]:
    """Per-step accidental rate (Hz) for every (detector, condition) series."""
    rates: Dict[Key, np.ndarray] = {}
    dwell = np.where(table.dwell > 0, table.dwell, np.inf)
    for name in conditions:
        cond = resolve_condition(name)
        expected = table.conditioned_accidentals(cond)
        for i, det in enumerate(SYSTEM_DETECTORS):
            rates[(det, cond.name)] = expected[:, i] / dwell
    return rates


def subtract_background(
    scan: FringeScan,
    accidental_rate: Union[float, Mapping[Key, Union[float, np.ndarray]]],
    dwell: Optional[Union[float, np.ndarray]] = None,
) -> FringeScan:
    """Remove ``rate * dwell`` from every bin, clamped at zero; variances add."""
    dwell_arr = scan.dwell if dwell is None else np.broadcast_to(np.asarray(dwell, dtype=float), scan.dwell.shape)
    counts, variances = {}, {}
    for key, values in scan.counts.items():
        rate = accidental_rate.get(key, 0.0) if isinstance(accidental_rate, Mapping) else accidental_rate
        background = np.asarray(rate, dtype=float) * dwell_arr
        counts[key] = np.clip(np.asarray(values, dtype=float) - background, 0.0, None)
        variances[key] = np.asarray(scan.variances[key], dtype=float) + background
    return replace(scan, counts=counts, variances=variances, background_subtracted=True)


def _sinusoid(phi, offset, amplitude, phase0):
    return offset + amplitude * np.cos(phi - phase0)


def _quadrature(phi, offset, a, b):
    return offset + a * np.cos(phi) + b * np.sin(phi)


@dataclass(frozen=True)
class FringeFit:
    detector: str
    condition: str
    offset: float
    amplitude: float
    phase0: float
    covariance: np.ndarray
    reduced_chi2: float
    visibility: Estimate
    raw_visibility: float
    n_points: int

    @property
    def offset_sigma(self) -> float:
        return float(math.sqrt(self.covariance[0, 0]))

    @property
    def amplitude_sigma(self) -> float:
        return float(math.sqrt(self.covariance[1, 1]))

    @property
    def phase0_sigma(self) -> float:
        return float(math.sqrt(self.covariance[2, 2]))

    def curve(self, phases: np.ndarray) -> np.ndarray:
        return _sinusoid(np.asarray(phases, dtype=float), self.offset, self.amplitude, self.phase0)

    def to_dict(self) -> Dict[str, object]:
        return {
            "detector": self.detector,
            "condition": self.condition,
            "offset": self.offset,
            "offset_sigma": self.offset_sigma,
            "amplitude": self.amplitude,
            "amplitude_sigma": self.amplitude_sigma,
            "phase0": self.phase0,
            "phase0_sigma": self.phase0_sigma,
            "reduced_residual": self.reduced_chi2,
            "visibility": self.visibility.to_dict(),
            "raw_visibility": self.raw_visibility,
            "points": self.n_points,
        }


def _check_coverage(phases: np.ndarray) -> None:
    if len(phases) < MIN_POINTS:
        raise InsufficientDataError(f"a fringe fit needs at least {MIN_POINTS} points, got {len(phases)}")
    ordered = np.sort(phases)
    spacing = float(np.median(np.diff(ordered)))
    if ordered[-1] - ordered[0] + spacing < 2.0 * math.pi - 1e-9:
        raise InsufficientDataError("phase points do not span one period")


def fit_fringe(scan: FringeScan, detector: str, condition) -> FringeFit:
    """Weighted least squares of C(phi) = O + A cos(phi - phi0).

    Weights are Poissonian (variance floored at one count). V = A / O with
    first-order error propagation through the fit covariance.
    """
    cond = resolve_condition(condition)
    counts, variances = scan.series(detector, cond)
    phases = np.asarray(scan.phases, dtype=float)
    _check_coverage(phases)
    sigma = np.sqrt(np.maximum(variances, 1.0))

    # fitted in quadrature form O + a cos(phi) + b sin(phi), which stays
    # well conditioned when the amplitude vanishes
    design = np.column_stack([np.ones_like(phases), np.cos(phases), np.sin(phases)])
    (o0, a0, b0), *_ = np.linalg.lstsq(design / sigma[:, None], counts / sigma, rcond=None)
    try:
        params, quad_cov = curve_fit(_quadrature, phases, counts, p0=(o0, a0, b0), sigma=sigma, absolute_sigma=True)
    except (RuntimeError, ValueError) as exc:
        raise FitError(f"fit did not converge for {detector}|{cond.name}: {exc}") from exc
    if not np.all(np.isfinite(quad_cov)):
        raise FitError(f"fit covariance undefined for {detector}|{cond.name}")
    offset, a, b = (float(p) for p in params)
    if offset <= 0:
        raise FitError(f"nonpositive fringe offset {offset:.3g} for {detector}|{cond.name}")

    amplitude = math.hypot(a, b)
    phase0 = math.atan2(b, a)
    if amplitude > 0:
        jacobian = np.array(
            [[1.0, 0.0, 0.0], [0.0, a / amplitude, b / amplitude], [0.0, -b / amplitude**2, a / amplitude**2]]
        )
        covariance = jacobian @ quad_cov @ jacobian.T
    else:
        covariance = np.diag([quad_cov[0, 0], 0.5 * (quad_cov[1, 1] + quad_cov[2, 2]), np.inf])
    gradient = np.array([-amplitude / offset**2, 1.0 / offset])
    v_sigma = float(math.sqrt(max(gradient @ covariance[:2, :2] @ gradient, 0.0)))

    residual = counts - _sinusoid(phases, offset, amplitude, phase0)
    dof = max(len(phases) - 3, 1)
    reduced_chi2 = float(np.sum((residual / sigma) ** 2) / dof)

    c_max, c_min = float(counts.max()), float(counts.min())
    raw = visibility_from_extrema(c_max, c_min) if c_max > 0 else 0.0

    fit = FringeFit(
        detector=detector,
        condition=cond.name,
        offset=offset,
        amplitude=amplitude,
        phase0=phase0,
        covariance=covariance,
        reduced_chi2=reduced_chi2,
        visibility=Estimate(amplitude / offset, v_sigma),
        raw_visibility=raw,
        n_points=len(phases),
    )
    logger.debug("fit %s|%s: V = %s, reduced residual %.2f", detector, cond.name, fit.visibility, reduced_chi2)
    return fit


def average_visibility(fits: Iterable[FringeFit]) -> Estimate:
    """Inverse-variance weighted mean of the fitted visibilities."""
    fits = list(fits)
    if not fits:
        raise InsufficientDataError("no fits to average")
    values = np.array([f.visibility.value for f in fits])
    sigmas = np.array([f.visibility.sigma for f in fits])
    if np.any(sigmas <= 0):
        return Estimate(float(values.mean()), float(np.sqrt(np.sum(sigmas**2)) / len(values)))
    weights = 1.0 / sigmas**2
    return Estimate(float(np.sum(weights * values) / weights.sum()), float(1.0 / math.sqrt(weights.sum())))


def phase_difference(first: FringeFit, second: FringeFit) -> Estimate:
    """Wrapped phase0 difference in [0, 2 pi) with combined sigma."""
    delta = (second.phase0 - first.phase0) % (2.0 * math.pi)
    return Estimate(float(delta), float(math.hypot(first.phase0_sigma, second.phase0_sigma)))


__all__ = [
    "FringeFit",
    "FringeScan",
    "average_visibility",
    "background_rates",
    "fit_fringe",
    "fringe_scan",
    "phase_difference",
    "subtract_background",
]
