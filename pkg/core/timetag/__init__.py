"""Independent time tagging, clock offset recovery and coincidence matching."""

from core.timetag.clock import apply_clock
from core.timetag.coincidence import (
    CoincidenceSet,
    OffsetEstimate,
    accidental_rate,
    estimate_clock_offset,
    find_coincidences,
    offset_window_accidentals,
)
from core.timetag.io import read_stream, write_coincidences, write_stream
from core.timetag.model import (
    Channel,
    ClockDiscipline,
    ClockModel,
    Side,
    TimeTag,
    TimeTagStream,
    concatenate_streams,
)

__all__ = [
    "Channel",
    "ClockDiscipline",
    "ClockModel",
    "CoincidenceSet",
    "OffsetEstimate",
    "Side",
    "TimeTag",
    "TimeTagStream",
    "accidental_rate",
    "apply_clock",
    "concatenate_streams",
    "estimate_clock_offset",
    "find_coincidences",
    "offset_window_accidentals",
    "read_stream",
    "write_coincidences",
    "write_stream",
]
