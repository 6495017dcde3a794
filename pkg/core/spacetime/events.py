"""Spacetime events and their causal classification."""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np

from core.errors import DomainError, UnboundedSpeedError

SPEED_OF_LIGHT = 299_792_458.0
LIGHTLIKE_TOLERANCE_S = 1e-12


class IntervalClass(str, Enum):
    TIMELIKE_BEFORE = "timelike-before"
    TIMELIKE_AFTER = "timelike-after"
    LIGHTLIKE = "lightlike"
    SPACELIKE = "spacelike"


class Relation(str, Enum):
    BEFORE = "before"
    AFTER = "after"
    SPACELIKE = "spacelike"
    MIXED = "mixed"

    def inverse(self) -> "Relation":
        if self is Relation.BEFORE:
            return Relation.AFTER
        if self is Relation.AFTER:
            return Relation.BEFORE
        return self


@dataclass(frozen=True)
class SpacetimeEvent:
    label: str
    position: Tuple[float, float, float]
    time: float

    def __post_init__(self) -> None:
        position = tuple(float(x) for x in self.position)
        if len(position) == 1:
            position = (position[0], 0.0, 0.0)
        if len(position) != 3:
            raise DomainError(f"position of {self.label} must have 3 components")
        if not all(math.isfinite(x) for x in position) or not math.isfinite(self.time):
            raise DomainError(f"coordinates of {self.label} are not finite")
        object.__setattr__(self, "position", position)
        object.__setattr__(self, "time", float(self.time))

    @classmethod
    def at(cls, label: str, x: float, time: float) -> "SpacetimeEvent":
        return cls(label, (x, 0.0, 0.0), time)

    def distance_to(self, other: "SpacetimeEvent") -> float:
        return math.dist(self.position, other.position)


@dataclass(frozen=True)
class ExtendedEvent:
    """A labelled region represented by sample events."""

    label: str
    samples: Tuple[SpacetimeEvent, ...]

    def __post_init__(self) -> None:
        samples = tuple(self.samples)
        if not samples:
            raise DomainError(f"extended event {self.label} has no samples")
        if any(sample.label != self.label for sample in samples):
            raise DomainError(f"samples of {self.label} carry a different label")
        object.__setattr__(self, "samples", samples)

    @classmethod
    def point(cls, label: str, x: float, time: float) -> "ExtendedEvent":
        return cls(label, (SpacetimeEvent.at(label, x, time),))

    @classmethod
    def duration(cls, label: str, x: float, start: float, end: float, samples: int = 2) -> "ExtendedEvent":
        """Events at a fixed position spanning [start, end]."""
        if end < start:
            raise DomainError(f"{label}: duration ends before it starts")
        count = 1 if end == start else max(2, samples)
        times = np.linspace(start, end, count)
        return cls(label, tuple(SpacetimeEvent.at(label, x, float(t)) for t in times))

    @property
    def start(self) -> float:
        return min(sample.time for sample in self.samples)

    @property
    def end(self) -> float:
        return max(sample.time for sample in self.samples)

    @property
    def position(self) -> Tuple[float, float, float]:
        return self.samples[0].position


def classify_interval(
    e1: SpacetimeEvent, e2: SpacetimeEvent, c: float = SPEED_OF_LIGHT
) -> IntervalClass:
    """Causal class of e2 relative to e1; "before" means e1 precedes e2."""
    dt = e2.time - e1.time
    light_time = e1.distance_to(e2) / c
    gap = light_time - abs(dt)
    if abs(gap) <= LIGHTLIKE_TOLERANCE_S:
        return IntervalClass.LIGHTLIKE
    if gap > 0:
        return IntervalClass.SPACELIKE
    return IntervalClass.TIMELIKE_BEFORE if dt > 0 else IntervalClass.TIMELIKE_AFTER


def _pair_relation(e1: SpacetimeEvent, e2: SpacetimeEvent, c: float) -> Relation:
    interval = classify_interval(e1, e2, c)
    if interval is IntervalClass.SPACELIKE:
        return Relation.SPACELIKE
    if interval is IntervalClass.TIMELIKE_BEFORE:
        return Relation.BEFORE
    if interval is IntervalClass.TIMELIKE_AFTER:
        return Relation.AFTER
    # lightlike pairs are causally ordered unless the events coincide
    dt = e2.time - e1.time
    if dt > 0:
        return Relation.BEFORE
    if dt < 0:
        return Relation.AFTER
    return Relation.MIXED


def relate_extended(a: ExtendedEvent, b: ExtendedEvent, c: float = SPEED_OF_LIGHT) -> Relation:
    """Relation of region a to region b over every pair of samples."""
    seen = {_pair_relation(x, y, c) for x in a.samples for y in b.samples}
    if len(seen) == 1:
        return seen.pop()
    return Relation.MIXED


def required_signal_speed(
    source: SpacetimeEvent, target: SpacetimeEvent, c: float = SPEED_OF_LIGHT
) -> float:
    """Speed, in units of c, a signal needs to get from source to target."""
    dt = target.time - source.time
    dx = source.distance_to(target)
    if dt <= 0:
        if dx > 0:
            raise UnboundedSpeedError(
                f"{target.label} is not later than {source.label}; no finite speed connects them"
            )
        raise DomainError(f"{target.label} must be later than {source.label}")
    return dx / dt / c


def min_required_signal_speed(a: ExtendedEvent, b: ExtendedEvent, c: float = SPEED_OF_LIGHT) -> float:
    """Least demanding speed from any sample of a to any later sample of b."""
    speeds = [
        required_signal_speed(x, y, c)
        for x in a.samples
        for y in b.samples
        if y.time > x.time
    ]
    if not speeds:
        raise UnboundedSpeedError(f"no sample of {b.label} lies after a sample of {a.label}")
    return min(speeds)


def boost_event(event: SpacetimeEvent, beta: float, c: float = SPEED_OF_LIGHT) -> SpacetimeEvent:
    """Coordinates in a frame moving with velocity beta*c along x."""
    if not -1.0 < beta < 1.0:
        raise DomainError(f"boost velocity must satisfy |beta| < 1, got {beta}")
    gamma = 1.0 / math.sqrt(1.0 - beta * beta)
    x, y, z = event.position
    t = event.time
    return SpacetimeEvent(
        event.label,
        (gamma * (x - beta * c * t), y, z),
        gamma * (t - beta * x / c),
    )


def boost_extended(event: ExtendedEvent, beta: float, c: float = SPEED_OF_LIGHT) -> ExtendedEvent:
    return ExtendedEvent(event.label, tuple(boost_event(s, beta, c) for s in event.samples))


__all__ = [
    "ExtendedEvent",
    "IntervalClass",
    "LIGHTLIKE_TOLERANCE_S",
    "Relation",
    "SPEED_OF_LIGHT",
    "SpacetimeEvent",
    "boost_event",
    "boost_extended",
    "classify_interval",
    "min_required_signal_speed",
    "relate_extended",
    "required_signal_speed",
]
