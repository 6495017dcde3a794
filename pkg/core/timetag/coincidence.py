"""Offline coincidence reconstruction between two independent tag streams."""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import pandas as pd

from core.errors import DataError, DomainError, NoCorrelationError
from core.timetag.model import ABSENT, PS_PER_S, Side, TimeTagStream

logger = logging.getLogger(__name__)

PEAK_SIGNIFICANCE = 5.0


@dataclass(frozen=True, eq=False)
class CoincidenceSet:
    """Matched tag pairs; ``dt_ps`` is t_a - t_b (before the offset is removed)."""

    a: TimeTagStream
    b: TimeTagStream
    a_index: np.ndarray
    b_index: np.ndarray
    dt_ps: np.ndarray
    window_ps: int
    offset_ps: int

    def __len__(self) -> int:
        return len(self.a_index)

    @property
    def window_s(self) -> float:
        return self.window_ps / PS_PER_S

    @property
    def offset_s(self) -> float:
        return self.offset_ps / PS_PER_S

    def pairs(self) -> set:
        return set(zip(self.a_index.tolist(), self.b_index.tolist()))

    def oriented(self) -> Tuple[TimeTagStream, np.ndarray, TimeTagStream, np.ndarray]:
        """(system stream, system indices, environment stream, environment indices)."""
        if self.a.side is Side.SYSTEM or self.b.side is Side.ENVIRONMENT:
            return self.a, self.a_index, self.b, self.b_index
        return self.b, self.b_index, self.a, self.a_index

    def to_frame(self) -> pd.DataFrame:
        sys_stream, sys_idx, env_stream, env_idx = self.oriented()
        t_sys = sys_stream.times[sys_idx]
        t_env = env_stream.times[env_idx]
        return pd.DataFrame(
            {
                "t_sys_ps": t_sys,
                "t_env_ps": t_env,
                "dt_ps": t_sys - t_env,
                "ch_sys": [f"Det{c}" for c in sys_stream.channels[sys_idx]],
                "ch_env": [f"Det{c}" for c in env_stream.channels[env_idx]],
                "eom_bit": _annotation_column(env_stream.eom_bits[env_idx]),
                "scanner_step": _annotation_column(sys_stream.scanner_steps[sys_idx]),
            }
        )


def _annotation_column(values: np.ndarray) -> list:
    return ["-" if v == ABSENT else str(int(v)) for v in values]


def _check_sorted(stream: TimeTagStream, name: str) -> None:
    if len(stream) > 1 and np.any(np.diff(stream.times) < 0):
        raise DataError(f"stream {name} is not sorted by time")


def find_coincidences(
    a: TimeTagStream, b: TimeTagStream, window_ps: int, offset_ps: int = 0
) -> CoincidenceSet:
    """Pair tags with 2*|t_a - t_b - offset| <= window (full-width window).

    Each tag is used at most once. Candidates are accepted in order of
    increasing residual |t_a - t_b - offset|, then earliest pair
    (smallest t_a + t_b).
    """
    if window_ps <= 0:
        raise DomainError(f"window must be positive, got {window_ps} ps")
    _check_sorted(a, "a")
    _check_sorted(b, "b")
    window_ps = int(window_ps)
    offset_ps = int(offset_ps)
    empty = np.empty(0, dtype=np.int64)
    if len(a) == 0 or len(b) == 0:
        return CoincidenceSet(a, b, empty, empty, empty, window_ps, offset_ps)

    half = window_ps // 2
    target = a.times - offset_ps
    lo = np.searchsorted(b.times, target - half, side="left")
    hi = np.searchsorted(b.times, target + half, side="right")
    counts = hi - lo
    if not counts.any():
        return CoincidenceSet(a, b, empty, empty, empty, window_ps, offset_ps)

    cand_a = np.repeat(np.arange(len(a)), counts)
    starts = np.repeat(lo, counts)
    group_offsets = np.arange(len(cand_a)) - np.repeat(np.cumsum(counts) - counts, counts)
    cand_b = starts + group_offsets

    residual = a.times[cand_a] - b.times[cand_b] - offset_ps
    order = np.lexsort((cand_b, cand_a, a.times[cand_a] + b.times[cand_b], np.abs(residual)))
    cand_a, cand_b = cand_a[order], cand_b[order]

    # pairs whose tags appear in no other candidate need no arbitration
    a_multiplicity = np.bincount(cand_a, minlength=len(a))
    b_multiplicity = np.bincount(cand_b, minlength=len(b))
    unique = (a_multiplicity[cand_a] == 1) & (b_multiplicity[cand_b] == 1)

    accepted = np.zeros(len(cand_a), dtype=bool)
    accepted[unique] = True
    used_a = np.zeros(len(a), dtype=bool)
    used_b = np.zeros(len(b), dtype=bool)
    for k in np.flatnonzero(~unique):
        i, j = cand_a[k], cand_b[k]
        if used_a[i] or used_b[j]:
            continue
        used_a[i] = used_b[j] = True
        accepted[k] = True

    a_index = cand_a[accepted]
    b_index = cand_b[accepted]
    by_time = np.argsort(a_index, kind="stable")
    a_index, b_index = a_index[by_time], b_index[by_time]
    dt = a.times[a_index] - b.times[b_index]
    return CoincidenceSet(a, b, a_index, b_index, dt, window_ps, offset_ps)


@dataclass(frozen=True)
class OffsetEstimate:
    offset_ps: float
    uncertainty_ps: float
    peak_counts: int
    background_mean: float
    background_sigma: float

    @property
    def significance(self) -> float:
        return (self.peak_counts - self.background_mean) / self.background_sigma


def _time_differences(
    a_times: np.ndarray, b_times: np.ndarray, center_ps: int, span_ps: int
) -> np.ndarray:
    target = a_times - center_ps
    lo = np.searchsorted(b_times, target - span_ps, side="left")
    hi = np.searchsorted(b_times, target + span_ps, side="left")
    counts = hi - lo
    if not counts.any():
        return np.empty(0, dtype=np.int64)
    cand_a = np.repeat(np.arange(len(a_times)), counts)
    cand_b = np.repeat(lo, counts) + (np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts))
    return a_times[cand_a] - b_times[cand_b]


def estimate_clock_offset(
    a: TimeTagStream,
    b: TimeTagStream,
    search_span_ps: int,
    bin_ps: int,
    center_ps: int = 0,
    max_tags: Optional[int] = None,
) -> OffsetEstimate:
    """Peak of the t_a - t_b histogram over center +/- span.

    ``max_tags`` limits the search to the first tags of stream a (and the
    matching time range of b).
    """
    if bin_ps <= 0 or search_span_ps <= 0:
        raise DomainError("bin and search span must be positive")
    a_times = a.times
    b_times = b.times
    if max_tags is not None and len(a_times) > max_tags:
        a_times = a_times[:max_tags]
        last = a_times[-1] - center_ps + search_span_ps
        b_times = b_times[: np.searchsorted(b_times, last, side="right")]

    differences = _time_differences(a_times, b_times, int(center_ps), int(search_span_ps))
    n_bins = int(np.ceil(2 * search_span_ps / bin_ps))
    if len(differences) == 0 or n_bins < 5:
        raise NoCorrelationError("no tag pairs inside the offset search span")

    edges_start = center_ps - search_span_ps
    bins = (differences - edges_start) // bin_ps
    bins = bins[(bins >= 0) & (bins < n_bins)]
    histogram = np.bincount(bins, minlength=n_bins)

    peak = int(np.argmax(histogram))
    peak_counts = int(histogram[peak])
    mask = np.ones(n_bins, dtype=bool)
    mask[max(0, peak - 2) : peak + 3] = False
    background = histogram[mask]
    mean = float(background.mean()) if background.size else 0.0
    sigma = max(float(background.std()) if background.size else 0.0, float(np.sqrt(mean)), 1.0)
    if peak_counts < mean + PEAK_SIGNIFICANCE * sigma:
        raise NoCorrelationError(
            f"no significant coincidence peak: max bin {peak_counts} vs background {mean:.2f} +/- {sigma:.2f}"
        )

    # centroid of the peak and its neighbours, background removed
    lo_bin, hi_bin = max(0, peak - 1), min(n_bins, peak + 2)
    weights = np.clip(histogram[lo_bin:hi_bin] - mean, 0.0, None)
    centers = edges_start + (np.arange(lo_bin, hi_bin) + 0.5) * bin_ps
    offset = float(np.sum(weights * centers) / np.sum(weights))

    estimate = OffsetEstimate(
        offset_ps=offset,
        uncertainty_ps=bin_ps / np.sqrt(peak_counts),
        peak_counts=peak_counts,
        background_mean=mean,
        background_sigma=sigma,
    )
    logger.info("Clock offset %.1f ps +/- %.1f ps (peak %d counts)", offset, estimate.uncertainty_ps, peak_counts)
    return estimate


def accidental_rate(r1: float, r2: float, window_s: float) -> float:
    """Rate of chance coincidences between two independent Poisson streams."""
    if r1 < 0 or r2 < 0 or window_s < 0:
        raise DomainError("rates and window must be nonnegative")
    return r1 * r2 * window_s


def offset_window_accidentals(
    a: TimeTagStream, b: TimeTagStream, window_ps: int, offset_ps: int, shift_ps: int
) -> int:
    """Coincidences counted in a window displaced by ``shift_ps`` from the true offset."""
    if abs(shift_ps) <= window_ps:
        raise DomainError("the displaced window must not overlap the signal window")
    return len(find_coincidences(a, b, window_ps, offset_ps + shift_ps))


__all__ = [
    "CoincidenceSet",
    "OffsetEstimate",
    "accidental_rate",
    "estimate_clock_offset",
    "find_coincidences",
    "offset_window_accidentals",
]
