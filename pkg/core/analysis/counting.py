"""Coincidence tallies, conditioning and Poissonian estimates."""

import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np

from core.errors import DataError, DomainError, InsufficientDataError
from core.timetag.coincidence import CoincidenceSet
from core.timetag.model import PS_PER_S, Channel, TimeTagStream

SYSTEM_DETECTORS = ("Det1", "Det2")


@dataclass(frozen=True)
class Estimate:
    value: float
    sigma: float

    def __post_init__(self) -> None:
        if self.sigma < 0 or math.isnan(self.sigma):
            raise DomainError(f"sigma must be nonnegative, got {self.sigma}")

    def to_dict(self) -> Dict[str, float]:
        return {"value": self.value, "sigma": self.sigma}

    def __str__(self) -> str:
        return f"{self.value:.4f} ± {self.sigma:.4f}"


@dataclass(frozen=True)
class Condition:
    """Environment outcome: one PBS output detector at one EOM setting."""

    name: str
    channel: Channel
    eom_bit: int

    @property
    def env_index(self) -> int:
        return int(self.channel) - int(Channel.DET3)


CONDITIONS: Dict[str, Condition] = {
    "H": Condition("H", Channel.DET3, 0),
    "V": Condition("V", Channel.DET4, 0),
    "L": Condition("L", Channel.DET3, 1),
    "R": Condition("R", Channel.DET4, 1),
}
# Canaries erasing basis is diagonal; same detectors and EOM bit as L/R
CONDITION_ALIASES = {"+": "L", "-": "R"}


def resolve_condition(condition) -> Condition:
    if isinstance(condition, Condition):
        return condition
    name = CONDITION_ALIASES.get(str(condition), str(condition))
    try:
        return CONDITIONS[name]
    except KeyError as exc:
        known = ", ".join(list(CONDITIONS) + list(CONDITION_ALIASES))
        raise DomainError(f"unknown condition '{condition}' (known: {known})") from exc


def minus_port_condition(eom_bit: int) -> Condition:
    return CONDITIONS["R"] if eom_bit else CONDITIONS["V"]


def probabilities_from_counts(n1: float, n2: float) -> Dict[str, Estimate]:
    """Binomial fractions n_i / (n1 + n2) with sigma^2 = n1 * n2 / N^3."""
    total = n1 + n2
    if total <= 0:
        raise InsufficientDataError("no conditioned coincidences")
    sigma = math.sqrt(max(n1, 0.0) * max(n2, 0.0) / total**3)
    return {
        SYSTEM_DETECTORS[0]: Estimate(n1 / total, sigma),
        SYSTEM_DETECTORS[1]: Estimate(n2 / total, sigma),
    }


def conditional_probabilities(coincidences: CoincidenceSet, condition) -> Dict[str, Estimate]:
    """P(system detector | environment condition) among matched pairs."""
    cond = resolve_condition(condition)
    sys_stream, sys_idx, env_stream, env_idx = coincidences.oriented()
    selected = (env_stream.channels[env_idx] == int(cond.channel)) & (env_stream.eom_bits[env_idx] == cond.eom_bit)
    channels = sys_stream.channels[sys_idx][selected]
    n1 = int(np.count_nonzero(channels == Channel.DET1))
    n2 = int(np.count_nonzero(channels == Channel.DET2))
    return probabilities_from_counts(n1, n2)


@dataclass(frozen=True, eq=False)
class CountTable:
    """Coincidence and singles counts of one run.

    ``coincidences[step, sys, env, eom]``: sys 0/1 = Det1/Det2, env 0/1 =
    Det3/Det4, eom 0/1 = the EOM bit. Environment tags without a valid EOM
    setting are not counted.
    """

    coincidences: np.ndarray
    sys_singles: np.ndarray
    env_singles: np.ndarray
    env_duration: float
    dwell: np.ndarray
    window_ps: int

    def __post_init__(self) -> None:
        n_steps = len(self.dwell)
        if self.coincidences.shape != (n_steps, 2, 2, 2):
            raise DataError(f"coincidence table has shape {self.coincidences.shape}")
        if self.sys_singles.shape != (n_steps, 2) or self.env_singles.shape != (2, 2):
            raise DataError("singles tables do not match the step count")

    @property
    def n_steps(self) -> int:
        return len(self.dwell)

    @property
    def total_coincidences(self) -> int:
        return int(self.coincidences.sum())

    def conditioned(self, condition) -> np.ndarray:
        """Counts [step, Det1/Det2] for one environment condition."""
        cond = resolve_condition(condition)
        return self.coincidences[:, :, cond.env_index, cond.eom_bit]

    def accidentals(self) -> np.ndarray:
        """Expected chance coincidences, same layout as ``coincidences``."""
        if self.env_duration <= 0:
            return np.zeros_like(self.coincidences, dtype=float)
        env_rate = self.env_singles / self.env_duration
        window_s = self.window_ps / PS_PER_S
        return self.sys_singles[:, :, None, None] * env_rate[None, None, :, :] * window_s

    def conditioned_accidentals(self, condition) -> np.ndarray:
        cond = resolve_condition(condition)
        return self.accidentals()[:, :, cond.env_index, cond.eom_bit]

    def merge(self, other: "CountTable") -> "CountTable":
        """Sum of two tables over the same steps."""
        if other.n_steps != self.n_steps or other.window_ps != self.window_ps:
            raise DataError("cannot merge tables with different steps or windows")
        return CountTable(
            self.coincidences + other.coincidences,
            self.sys_singles + other.sys_singles,
            self.env_singles + other.env_singles,
            self.env_duration + other.env_duration,
            self.dwell + other.dwell,
            self.window_ps,
        )

    def to_dict(self) -> Dict[str, object]:
        return {
            "window_ps": self.window_ps,
            "dwell_s": self.dwell.tolist(),
            "env_duration_s": self.env_duration,
            "coincidences": self.coincidences.tolist(),
            "sys_singles": self.sys_singles.tolist(),
            "env_singles": self.env_singles.tolist(),
        }


def estimate_dwell(stream: TimeTagStream, n_steps: int) -> np.ndarray:
    """Per-step dwell from the span of each step's system tags."""
    dwell = np.zeros(n_steps)
    for step in range(n_steps):
        times = stream.times[stream.scanner_steps == step]
        if len(times) > 1:
            dwell[step] = (times[-1] - times[0]) / PS_PER_S
    return dwell


def tally_coincidences(
    coincidences: CoincidenceSet,
    n_steps: Optional[int] = None,
    dwell: Optional[Sequence[float]] = None,
    env_duration: Optional[float] = None,
) -> CountTable:
    """Bin matched pairs by scanner step, detectors and EOM bit.

    Steps are the system tags' scanner-step labels, taken as 0..n_steps-1.
    Without ``dwell`` the per-step dwell is estimated from the tag spans.
    """
    sys_stream, sys_idx, env_stream, env_idx = coincidences.oriented()
    if n_steps is None:
        valid_steps = sys_stream.scanner_steps[sys_stream.scanner_steps >= 0]
        n_steps = int(valid_steps.max()) + 1 if len(valid_steps) else 1

    steps = sys_stream.scanner_steps[sys_idx].astype(np.int64)
    s = sys_stream.channels[sys_idx].astype(np.int64) - int(Channel.DET1)
    e = env_stream.channels[env_idx].astype(np.int64) - int(Channel.DET3)
    b = env_stream.eom_bits[env_idx].astype(np.int64)
    keep = (steps >= 0) & (steps < n_steps) & ((b == 0) | (b == 1))
    flat = np.ravel_multi_index((steps[keep], s[keep], e[keep], b[keep]), (n_steps, 2, 2, 2))
    table = np.bincount(flat, minlength=n_steps * 8).reshape(n_steps, 2, 2, 2)

    sys_steps = sys_stream.scanner_steps.astype(np.int64)
    sys_ch = sys_stream.channels.astype(np.int64) - int(Channel.DET1)
    in_range = (sys_steps >= 0) & (sys_steps < n_steps)
    sys_singles = np.bincount(
        sys_steps[in_range] * 2 + sys_ch[in_range], minlength=n_steps * 2
    ).reshape(n_steps, 2)

    env_ch = env_stream.channels.astype(np.int64) - int(Channel.DET3)
    env_bits = env_stream.eom_bits.astype(np.int64)
    valid = (env_bits == 0) | (env_bits == 1)
    env_singles = np.bincount(env_ch[valid] * 2 + env_bits[valid], minlength=4).reshape(2, 2)

    dwell_arr = np.asarray(dwell, dtype=float) if dwell is not None else estimate_dwell(sys_stream, n_steps)
    if len(dwell_arr) != n_steps:
        raise DataError(f"{len(dwell_arr)} dwell values for {n_steps} steps")
    if env_duration is None:
        env_duration = float(dwell_arr.sum()) or env_stream.span_ps / PS_PER_S
    return CountTable(table, sys_singles, env_singles, float(env_duration), dwell_arr, coincidences.window_ps)


__all__ = [
    "CONDITIONS",
    "Condition",
    "CountTable",
    "Estimate",
    "conditional_probabilities",
    "estimate_dwell",
    "minus_port_condition",
    "probabilities_from_counts",
    "resolve_condition",
    "tally_coincidences",
]
