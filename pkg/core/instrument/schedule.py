"""Piezo step schedules of the system interferometer."""

import math
from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np

from core.errors import ConfigurationError
from core.quantum.interferometer import Blocked, InterferometerConfig


@dataclass(frozen=True)
class ScheduleStep:
    step: int
    phase: float
    dwell: float

    def __post_init__(self) -> None:
        if not self.dwell > 0:
            raise ConfigurationError(f"dwell must be positive, got {self.dwell}", field="schedule.dwell")
        if not math.isfinite(self.phase):
            raise ConfigurationError("phase must be finite", field="schedule.phase")


@dataclass(frozen=True)
class InterferometerSchedule:
    """Consecutive piezo steps; phase is constant within a step."""

    steps: Tuple[ScheduleStep, ...]
    blocked: Blocked = Blocked.NONE
    contrast: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "steps", tuple(self.steps))
        object.__setattr__(self, "blocked", Blocked(self.blocked))
        if not self.steps:
            raise ConfigurationError("schedule has no steps", field="schedule.steps")
        indices = [s.step for s in self.steps]
        if len(set(indices)) != len(indices):
            raise ConfigurationError("step indices must be unique", field="schedule.steps")

    @classmethod
    def constant(
        cls, phase: float, dwell: float, blocked: Blocked = Blocked.NONE, contrast: float = 1.0, step: int = 0
    ) -> "InterferometerSchedule":
        return cls((ScheduleStep(step, phase, dwell),), blocked, contrast)

    @classmethod
    def scan(
        cls,
        n_steps: int,
        rad_per_step: float,
        dwell: float,
        contrast: float = 1.0,
        phase0: float = 0.0,
        blocked: Blocked = Blocked.NONE,
    ) -> "InterferometerSchedule":
        if n_steps < 1:
            raise ConfigurationError("need at least one step", field="schedule.steps")
        steps = tuple(ScheduleStep(k, phase0 + k * rad_per_step, dwell) for k in range(n_steps))
        return cls(steps, blocked, contrast)

    @classmethod
    def from_steps(
        cls, steps: Iterable[ScheduleStep], blocked: Blocked = Blocked.NONE, contrast: float = 1.0
    ) -> "InterferometerSchedule":
        return cls(tuple(steps), blocked, contrast)

    @property
    def duration(self) -> float:
        return float(sum(s.dwell for s in self.steps))

    @property
    def boundaries(self) -> np.ndarray:
        """Start time of every step plus the end of the last one."""
        return np.concatenate(([0.0], np.cumsum([s.dwell for s in self.steps])))

    def interferometer(self, index: int) -> InterferometerConfig:
        return InterferometerConfig(self.steps[index].phase, self.blocked, self.contrast)

    def position_of(self, times: np.ndarray) -> np.ndarray:
        """Schedule position (not step label) in force at each time."""
        edges = self.boundaries
        pos = np.searchsorted(edges, np.asarray(times, dtype=float), side="right") - 1
        return np.clip(pos, 0, len(self.steps) - 1)

    def with_blocked(self, blocked: Blocked) -> "InterferometerSchedule":
        return InterferometerSchedule(self.steps, blocked, self.contrast)

    def split(self, max_chunk_s: float) -> Tuple["InterferometerSchedule", ...]:
        """Single-step schedules no longer than ``max_chunk_s`` each."""
        chunks = []
        for s in self.steps:
            parts = max(1, int(math.ceil(s.dwell / max_chunk_s)))
            for _ in range(parts):
                chunks.append(InterferometerSchedule((ScheduleStep(s.step, s.phase, s.dwell / parts),), self.blocked, self.contrast))
        return tuple(chunks)


__all__ = ["InterferometerSchedule", "ScheduleStep"]
