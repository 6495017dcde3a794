"""Monte Carlo model of the source, switching optics and detectors."""

from core.instrument.config import (
    ArmChannels,
    ChannelConfig,
    EomConfig,
    EomMode,
    QrngConfig,
    SourceConfig,
)
from core.instrument.eom import EomState, eom_state_at, eom_states_at
from core.instrument.qrng import BitSequence, QrngSampler, qrng_stream
from core.instrument.rng import Subsystem, subsystem_rng
from core.instrument.schedule import InterferometerSchedule, ScheduleStep
from core.instrument.simulator import ClockPair, simulate_run

__all__ = [
    "ArmChannels",
    "BitSequence",
    "ChannelConfig",
    "ClockPair",
    "EomConfig",
    "EomMode",
    "EomState",
    "InterferometerSchedule",
    "QrngConfig",
    "QrngSampler",
    "ScheduleStep",
    "SourceConfig",
    "Subsystem",
    "eom_state_at",
    "eom_states_at",
    "qrng_stream",
    "simulate_run",
    "subsystem_rng",
]
