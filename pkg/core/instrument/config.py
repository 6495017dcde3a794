"""Source, QRNG, EOM and channel parameters of the simulated instrument."""

from dataclasses import asdict, dataclass
from enum import Enum
from typing import Any, Dict, Mapping, Optional

from core.errors import ConfigurationError
from core.schema import choice, integer, number


@dataclass(frozen=True)
class SourceConfig:
    """Pulsed SPDC source; a CW source is approximated by short time slots."""

    pulse_rate: float
    pair_prob_per_pulse: float
    arm_transmission_s: float = 1.0
    arm_transmission_e: float = 1.0
    pump_wavelength_nm: float = 405.0
    pair_wavelength_nm: float = 810.0

    @property
    def pair_rate(self) -> float:
        return self.pulse_rate * self.pair_prob_per_pulse

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], path: str = "source") -> "SourceConfig":
        return cls(
            pulse_rate=number(data, "pulse_rate", path, minimum=0.0, exclusive_minimum=True),
            pair_prob_per_pulse=number(data, "pair_prob_per_pulse", path, minimum=0.0, maximum=1.0),
            arm_transmission_s=number(data, "arm_transmission_s", path, default=1.0, minimum=0.0, maximum=1.0),
            arm_transmission_e=number(data, "arm_transmission_e", path, default=1.0, minimum=0.0, maximum=1.0),
            pump_wavelength_nm=number(data, "pump_wavelength_nm", path, default=405.0, minimum=0.0),
            pair_wavelength_nm=number(data, "pair_wavelength_nm", path, default=810.0, minimum=0.0),
        )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class QrngConfig:
    autocorrelation_time: float = 11e-9
    latency: float = 75e-9
    seed: Optional[int] = None

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], path: str = "qrng") -> "QrngConfig":
        return cls(
            autocorrelation_time=number(data, "autocorrelation_time", path, default=11e-9, minimum=0.0),
            latency=number(data, "latency", path, default=75e-9, minimum=0.0),
            seed=integer(data, "seed", path, default=None, minimum=0),
        )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


class EomMode(str, Enum):
    PULSED_ON = "pulsed-on"
    TOGGLED = "toggled"
    STATIC = "static"


@dataclass(frozen=True)
class EomConfig:
    """Switching pattern of the environment-side EOM.

    ``pulsed-on``: a 1-bit opens a short window at the erasing drive.
    ``toggled``: every trigger sets the drive to +1 or -1 by the bit.
    ``static``: held at ``drive`` with no switching (characterization sweeps).
    """

    mode: EomMode
    toggle_rate: float = 2e6
    rise_time: float = 4.5e-9
    on_window: float = 20e-9
    settle_discard: float = 35e-9
    quarter_voltage: float = 770.0
    drive: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", EomMode(self.mode))
        if not -1.0 <= self.drive <= 1.0:
            raise ConfigurationError("must lie in [-1, 1]", field="eom.drive")
        if self.mode is not EomMode.STATIC and self.toggle_rate <= 0:
            raise ConfigurationError("must be positive", field="eom.toggle_rate")
        if self.mode is EomMode.PULSED_ON:
            if self.on_window <= 0 or self.rise_time < 0:
                raise ConfigurationError("pulsed-on mode needs a positive on_window", field="eom.on_window")
            if self.rise_time + self.on_window > self.bit_period:
                raise ConfigurationError("rise_time + on_window exceed the bit period", field="eom.on_window")
        if self.mode is EomMode.TOGGLED and not 0 <= self.settle_discard < self.bit_period:
            raise ConfigurationError("settle_discard must lie inside one cycle", field="eom.settle_discard")

    @property
    def bit_period(self) -> float:
        """Time between QRNG bits driving the EOM."""
        if self.mode is EomMode.PULSED_ON:
            return 1.0 / (2.0 * self.toggle_rate)
        return 1.0 / self.toggle_rate

    @property
    def on_fraction(self) -> float:
        if self.mode is EomMode.PULSED_ON:
            return 0.5 * self.on_window / self.bit_period
        if self.mode is EomMode.TOGGLED:
            return 0.5 * (1.0 - self.settle_discard / self.bit_period)
        return 1.0

    @property
    def valid_fraction(self) -> float:
        if self.mode is EomMode.PULSED_ON:
            return 1.0 - 0.5 * self.rise_time / self.bit_period
        if self.mode is EomMode.TOGGLED:
            return 1.0 - self.settle_discard / self.bit_period
        return 1.0

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], path: str = "eom") -> "EomConfig":
        return cls(
            mode=EomMode(choice(data, "mode", [m.value for m in EomMode], path)),
            toggle_rate=number(data, "toggle_rate", path, default=2e6, minimum=0.0),
            rise_time=number(data, "rise_time", path, default=4.5e-9, minimum=0.0),
            on_window=number(data, "on_window", path, default=20e-9, minimum=0.0),
            settle_discard=number(data, "settle_discard", path, default=35e-9, minimum=0.0),
            quarter_voltage=number(data, "quarter_voltage", path, default=770.0),
            drive=number(data, "drive", path, default=1.0, minimum=-1.0, maximum=1.0),
        )

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["mode"] = self.mode.value
        return data


@dataclass(frozen=True)
class ChannelConfig:
    """One arm's link loss and detector response."""

    attenuation_db: float = 0.0
    dark_rate: float = 0.0
    jitter_sigma: float = 0.0

    @property
    def transmission(self) -> float:
        return 10.0 ** (-self.attenuation_db / 10.0)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], path: str) -> "ChannelConfig":
        return cls(
            attenuation_db=number(data, "attenuation_db", path, default=0.0, minimum=0.0),
            dark_rate=number(data, "dark_rate", path, default=0.0, minimum=0.0),
            jitter_sigma=number(data, "jitter_sigma", path, default=0.0, minimum=0.0),
        )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class ArmChannels:
    system: ChannelConfig
    environment: ChannelConfig

    def to_dict(self) -> Dict[str, Any]:
        return {"system": self.system.to_dict(), "environment": self.environment.to_dict()}


__all__ = [
    "ArmChannels",
    "ChannelConfig",
    "EomConfig",
    "EomMode",
    "QrngConfig",
    "SourceConfig",
]
