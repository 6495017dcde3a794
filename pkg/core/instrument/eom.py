"""EOM drive and validity as a function of time."""

from dataclasses import dataclass

import numpy as np

from core.errors import DomainError
from core.instrument.config import EomConfig, EomMode
from core.instrument.qrng import BitSequence
from core.timetag.model import ABSENT


@dataclass(frozen=True)
class EomState:
    drive: float
    valid: bool
    eom_bit: int
    qrng_bit: int


@dataclass(frozen=True, eq=False)
class EomStates:
    """Vectorized EOM states; ``eom_bits`` is ABSENT where the setting is not valid."""

    drive: np.ndarray
    valid: np.ndarray
    eom_bits: np.ndarray
    qrng_bits: np.ndarray

    def __len__(self) -> int:
        return len(self.drive)

    def at(self, i: int) -> EomState:
        return EomState(float(self.drive[i]), bool(self.valid[i]), int(self.eom_bits[i]), int(self.qrng_bits[i]))


def cycle_position(times: np.ndarray, origin: float, period: float):
    """Cycle index and time since that cycle's trigger."""
    times = np.asarray(times, dtype=float)
    cycles = np.floor((times - origin) / period).astype(np.int64)
    since = times - origin - cycles * period
    return cycles, since


def states_from_bits(since: np.ndarray, bits: np.ndarray, cfg: EomConfig) -> EomStates:
    """States given the time since the last trigger and that trigger's bit."""
    since = np.asarray(since, dtype=float)
    n = len(since)
    bits = np.asarray(bits, dtype=np.int8)

    if cfg.mode is EomMode.STATIC:
        drive = np.full(n, cfg.drive)
        eom_bits = np.full(n, 1 if cfg.drive != 0.0 else 0, dtype=np.int8)
        return EomStates(drive, np.ones(n, dtype=bool), eom_bits, np.full(n, ABSENT, dtype=np.int8))

    if cfg.mode is EomMode.PULSED_ON:
        fired = bits == 1
        rising = fired & (since < cfg.rise_time)
        on = fired & (since >= cfg.rise_time) & (since < cfg.rise_time + cfg.on_window)
        drive = np.where(on, 1.0, 0.0)
        valid = ~rising
        eom_bits = on.astype(np.int8)
    else:
        drive = np.where(bits == 1, 1.0, -1.0)
        valid = since >= cfg.settle_discard
        eom_bits = (bits == 1).astype(np.int8)

    eom_bits = np.where(valid, eom_bits, ABSENT).astype(np.int8)
    return EomStates(drive, valid, eom_bits, bits.copy())


def eom_states_at(times: np.ndarray, bits: BitSequence, cfg: EomConfig) -> EomStates:
    times = np.asarray(times, dtype=float)
    if cfg.mode is EomMode.STATIC:
        return states_from_bits(np.zeros(len(times)), np.zeros(len(times), dtype=np.int8), cfg)
    if times.size and (times.min() < bits.trigger_start or times.max() >= bits.trigger_end):
        raise DomainError(
            f"time outside the driven span [{bits.trigger_start:.3e}, {bits.trigger_end:.3e}) s"
        )
    cycles, since = cycle_position(times, bits.trigger_start, bits.cadence_s)
    return states_from_bits(since, bits.bits[cycles], cfg)


def eom_state_at(t: float, bits: BitSequence, cfg: EomConfig) -> EomState:
    return eom_states_at(np.array([t]), bits, cfg).at(0)


def fraction_driven(states: EomStates, drive: float = 1.0) -> float:
    return float(np.mean(states.drive == drive)) if len(states) else 0.0


__all__ = [
    "EomState",
    "EomStates",
    "cycle_position",
    "eom_state_at",
    "eom_states_at",
    "fraction_driven",
    "states_from_bits",
]
