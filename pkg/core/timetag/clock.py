"""Conversion of lab-frame arrival times to local tagger time."""

import numpy as np

from core.timetag.model import PS_PER_S, ClockDiscipline, ClockModel


def gps_walk(times_s: np.ndarray, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Random-walk offset at each time, restarting at every whole second."""
    n = len(times_s)
    if n == 0 or sigma == 0.0:
        return np.zeros(n)
    order = np.argsort(times_s, kind="stable")
    ts = times_s[order]
    marks = np.floor(ts)

    new_segment = np.ones(n, dtype=bool)
    new_segment[1:] = marks[1:] != marks[:-1]
    previous = np.empty(n)
    previous[0] = marks[0]
    previous[1:] = ts[:-1]
    previous[new_segment] = marks[new_segment]

    steps = rng.standard_normal(n) * sigma * np.sqrt(ts - previous)
    cumulative = np.cumsum(steps)
    baseline = (cumulative - steps)[new_segment]
    segment_id = np.cumsum(new_segment) - 1
    walk = cumulative - baseline[segment_id]

    out = np.empty(n)
    out[order] = walk
    return out


def apply_clock(times_s: np.ndarray, clock: ClockModel, rng: np.random.Generator) -> np.ndarray:
    """Local integer-picosecond tags for lab-frame times in seconds."""
    times_s = np.asarray(times_s, dtype=float)
    local = clock.offset_s + (1.0 + clock.drift) * times_s
    if clock.discipline is ClockDiscipline.GPS:
        local = local + gps_walk(times_s, clock.walk_sigma, rng)
    if clock.jitter_sigma_s > 0:
        local = local + rng.normal(0.0, clock.jitter_sigma_s, len(times_s))
    ps = np.rint(local * PS_PER_S).astype(np.int64)
    return np.maximum(ps, 0)


__all__ = ["apply_clock", "gps_walk"]
