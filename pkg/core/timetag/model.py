"""Time-tag records, clock models and sealed per-lab streams."""

from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Dict, Iterable, Iterator, Optional, Tuple

import numpy as np

from core.errors import DataError, DomainError

ABSENT = -1
PS_PER_S = 1_000_000_000_000


class Side(str, Enum):
    SYSTEM = "system"
    ENVIRONMENT = "environment"


class Channel(IntEnum):
    DET1 = 1
    DET2 = 2
    DET3 = 3
    DET4 = 4

    @property
    def label(self) -> str:
        return f"Det{int(self)}"

    @classmethod
    def from_label(cls, label: str) -> "Channel":
        if not label.startswith("Det"):
            raise ValueError(f"invalid channel label '{label}'")
        return cls(int(label[3:]))


SIDE_CHANNELS: Dict[Side, Tuple[int, ...]] = {
    Side.SYSTEM: (Channel.DET1, Channel.DET2),
    Side.ENVIRONMENT: (Channel.DET3, Channel.DET4),
}

# environment PBS ports
PORT_CHANNELS: Dict[str, Channel] = {"plus": Channel.DET3, "minus": Channel.DET4}


class ClockDiscipline(str, Enum):
    SHARED_GENERATOR = "shared-generator"
    GPS = "gps"


@dataclass(frozen=True)
class ClockModel:
    """Local time base of one tagging unit.

    ``walk_sigma`` is the GPS random-walk strength in seconds per square-root
    second; the walk restarts from zero at every 1 Hz sync mark.
    """

    offset_s: float = 0.0
    drift: float = 0.0
    jitter_sigma_s: float = 0.0
    discipline: ClockDiscipline = ClockDiscipline.SHARED_GENERATOR
    walk_sigma: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "discipline", ClockDiscipline(self.discipline))
        if self.jitter_sigma_s < 0 or self.walk_sigma < 0:
            raise DomainError("clock jitter and walk must be nonnegative")
        if self.discipline is ClockDiscipline.SHARED_GENERATOR and (self.drift != 0 or self.walk_sigma != 0):
            raise DomainError("a shared-generator clock has no drift and no walk")

    def to_dict(self) -> Dict[str, object]:
        return {
            "offset_s": self.offset_s,
            "drift": self.drift,
            "jitter_sigma_s": self.jitter_sigma_s,
            "discipline": self.discipline.value,
            "walk_sigma": self.walk_sigma,
        }


@dataclass(frozen=True)
class TimeTag:
    time_ps: int
    channel: Channel
    eom_bit: Optional[int] = None
    qrng_bit: Optional[int] = None
    scanner_step: Optional[int] = None


def _optional(value: int) -> Optional[int]:
    return None if value == ABSENT else int(value)


@dataclass(frozen=True, eq=False)
class TimeTagStream:
    """Columnar, time-ordered tag log of one lab.

    Missing annotations are stored as -1. Arrays are read-only once the
    stream is built.
    """

    side: Side
    clock: ClockModel
    times: np.ndarray
    channels: np.ndarray
    eom_bits: np.ndarray
    qrng_bits: np.ndarray
    scanner_steps: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "side", Side(self.side))
        columns = {
            "times": np.asarray(self.times, dtype=np.int64),
            "channels": np.asarray(self.channels, dtype=np.int8),
            "eom_bits": np.asarray(self.eom_bits, dtype=np.int8),
            "qrng_bits": np.asarray(self.qrng_bits, dtype=np.int8),
            "scanner_steps": np.asarray(self.scanner_steps, dtype=np.int32),
        }
        n = len(columns["times"])
        for name, column in columns.items():
            if column.ndim != 1 or len(column) != n:
                raise DataError(f"column {name} has inconsistent length")
        times = columns["times"]
        if n and times[0] < 0:
            raise DataError("tag times must be nonnegative")
        if n > 1 and np.any(np.diff(times) < 0):
            raise DataError("tags are not sorted by time")
        allowed = np.array(SIDE_CHANNELS[self.side], dtype=np.int8)
        if n and not np.all(np.isin(columns["channels"], allowed)):
            raise DataError(f"channel not valid for the {self.side.value} side")
        for name, column in columns.items():
            column.setflags(write=False)
            object.__setattr__(self, name, column)

    @classmethod
    def empty(cls, side: Side, clock: Optional[ClockModel] = None) -> "TimeTagStream":
        return cls.from_tags(side, clock or ClockModel(), [])

    @classmethod
    def from_tags(cls, side: Side, clock: ClockModel, tags: Iterable[TimeTag]) -> "TimeTagStream":
        tags = list(tags)

        def column(attr: str) -> np.ndarray:
            return np.array([ABSENT if getattr(t, attr) is None else getattr(t, attr) for t in tags], dtype=np.int64)

        return cls(
            side=side,
            clock=clock,
            times=np.array([t.time_ps for t in tags], dtype=np.int64),
            channels=np.array([int(t.channel) for t in tags], dtype=np.int8),
            eom_bits=column("eom_bit"),
            qrng_bits=column("qrng_bit"),
            scanner_steps=column("scanner_step"),
        )

    def __len__(self) -> int:
        return len(self.times)

    def __iter__(self) -> Iterator[TimeTag]:
        for i in range(len(self)):
            yield self.tag(i)

    def tag(self, index: int) -> TimeTag:
        return TimeTag(
            time_ps=int(self.times[index]),
            channel=Channel(int(self.channels[index])),
            eom_bit=_optional(self.eom_bits[index]),
            qrng_bit=_optional(self.qrng_bits[index]),
            scanner_step=_optional(self.scanner_steps[index]),
        )

    def select(self, mask: np.ndarray) -> "TimeTagStream":
        return TimeTagStream(
            self.side,
            self.clock,
            self.times[mask],
            self.channels[mask],
            self.eom_bits[mask],
            self.qrng_bits[mask],
            self.scanner_steps[mask],
        )

    @property
    def span_ps(self) -> int:
        if len(self) == 0:
            return 0
        return int(self.times[-1] - self.times[0])

    def counts_by_channel(self) -> Dict[int, int]:
        return {int(ch): int(np.count_nonzero(self.channels == ch)) for ch in SIDE_CHANNELS[self.side]}

    def same_as(self, other: "TimeTagStream") -> bool:
        return (
            self.side == other.side
            and self.clock == other.clock
            and all(
                np.array_equal(getattr(self, name), getattr(other, name))
                for name in ("times", "channels", "eom_bits", "qrng_bits", "scanner_steps")
            )
        )


def concatenate_streams(streams: Iterable[TimeTagStream]) -> TimeTagStream:
    """Merge streams of one side into a single time-ordered stream."""
    streams = list(streams)
    if not streams:
        raise DataError("nothing to concatenate")
    side, clock = streams[0].side, streams[0].clock
    times = np.concatenate([s.times for s in streams])
    order = np.argsort(times, kind="stable")
    return TimeTagStream(
        side,
        clock,
        times[order],
        np.concatenate([s.channels for s in streams])[order],
        np.concatenate([s.eom_bits for s in streams])[order],
        np.concatenate([s.qrng_bits for s in streams])[order],
        np.concatenate([s.scanner_steps for s in streams])[order],
    )


__all__ = [
    "ABSENT",
    "Channel",
    "ClockDiscipline",
    "ClockModel",
    "PORT_CHANNELS",
    "PS_PER_S",
    "SIDE_CHANNELS",
    "Side",
    "TimeTag",
    "TimeTagStream",
    "concatenate_streams",
]
