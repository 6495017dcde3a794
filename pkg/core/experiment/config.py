"""Experiment configuration files: parsing, validation and manifests."""

import json
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Union

import yaml

from core.errors import ConfigurationError, DomainError
from core.instrument.config import ArmChannels, ChannelConfig, EomConfig, QrngConfig, SourceConfig
from core.instrument.schedule import InterferometerSchedule
from core.instrument.simulator import ClockPair
from core.quantum.optics import CHAIN_PRESETS, ChainSpec
from core.quantum.state import HybridState, make_hybrid_state
from core.schema import choice, integer, number, section
from core.spacetime.scenarios import ScenarioGeometry, build_scenario
from core.timetag.model import ClockDiscipline, ClockModel

DEFAULT_DWELL_S = 20.0
DEFAULT_BLOCKING_DWELL_S = 120.0
DEFAULT_STEPS = 16


@dataclass(frozen=True)
class StateSettings:
    v_hv: float = 1.0
    v_coh: float = 1.0

    def build(self) -> HybridState:
        return make_hybrid_state(self.v_hv, self.v_coh)


@dataclass(frozen=True)
class InterferometerSettings:
    """Mode contrast and the linear piezo-step to phase calibration."""

    contrast: float = 1.0
    rad_per_step: float = math.pi / 4.0
    phase0: float = 0.0


@dataclass(frozen=True)
class ScheduleSettings:
    steps: int = DEFAULT_STEPS
    dwell: float = DEFAULT_DWELL_S


@dataclass(frozen=True)
class BlockingSettings:
    dwell: float = DEFAULT_BLOCKING_DWELL_S


@dataclass(frozen=True)
class SweepSettings:
    fractions: Tuple[float, ...] = tuple(k / 7.0 for k in range(8))
    steps: int = 8
    dwell: float = 1.0
    blocking_dwell: float = 1.0


@dataclass(frozen=True)
class AnalysisSettings:
    window_ps: int = 1000
    subtract_background: bool = False
    blocking_condition: str = "V"


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce a simulated run."""

    scenario: str
    seed: int
    state: StateSettings
    chain: ChainSpec
    interferometer: InterferometerSettings
    source: SourceConfig
    qrng: QrngConfig
    eom: EomConfig
    channels: ArmChannels
    clocks: ClockPair
    schedule: ScheduleSettings
    blocking: Optional[BlockingSettings]
    sweep: SweepSettings
    analysis: AnalysisSettings
    name: str = ""
    output_dir: Optional[str] = None
    base_dir: Optional[Path] = field(default=None, compare=False)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], base_dir: Optional[Path] = None) -> "ExperimentConfig":
        if not isinstance(data, Mapping):
            raise ConfigurationError("configuration must be a mapping")
        seed = integer(data, "seed", minimum=0)
        scenario = data.get("scenario")
        if not scenario:
            raise ConfigurationError("missing", field="scenario")

        state_raw = section(data, "state", required=False)
        state = StateSettings(
            v_hv=number(state_raw, "v_hv", "state", default=1.0, minimum=0.0, maximum=1.0),
            v_coh=number(state_raw, "v_coh", "state", default=1.0, minimum=0.0, maximum=1.0),
        )
        try:
            state.build()
        except DomainError as exc:
            raise ConfigurationError(str(exc), field="state") from exc

        chain_raw = section(data, "chain", required=False)
        chain = ChainSpec(
            preset=choice(chain_raw, "preset", list(CHAIN_PRESETS), "chain", default="vienna"),
            pbs_extinction=number(chain_raw, "pbs_extinction", "chain", default=180.0, minimum=1.0, exclusive_minimum=True),
            eom_extinction=number(chain_raw, "eom_extinction", "chain", default=250.0, minimum=1.0, exclusive_minimum=True),
        )

        ifm_raw = section(data, "interferometer", required=False)
        interferometer = InterferometerSettings(
            contrast=number(ifm_raw, "contrast", "interferometer", default=1.0, minimum=0.0, maximum=1.0),
            rad_per_step=number(ifm_raw, "rad_per_step", "interferometer", default=math.pi / 4.0),
            phase0=number(ifm_raw, "phase0", "interferometer", default=0.0),
        )

        channels_raw = section(data, "channels", required=False)
        channels = ArmChannels(
            system=ChannelConfig.from_dict(section(channels_raw, "system", "channels", required=False), "channels.system"),
            environment=ChannelConfig.from_dict(
                section(channels_raw, "environment", "channels", required=False), "channels.environment"
            ),
        )

        clocks_raw = section(data, "clocks", required=False)
        clocks = ClockPair(
            system=_clock(section(clocks_raw, "system", "clocks", required=False), "clocks.system"),
            environment=_clock(section(clocks_raw, "environment", "clocks", required=False), "clocks.environment"),
        )

        schedule_raw = section(data, "schedule", required=False)
        schedule = ScheduleSettings(
            steps=integer(schedule_raw, "steps", "schedule", default=DEFAULT_STEPS, minimum=1),
            dwell=number(schedule_raw, "dwell", "schedule", default=DEFAULT_DWELL_S, minimum=0.0, exclusive_minimum=True),
        )

        blocking = None
        if data.get("blocking") is not None:
            blocking_raw = section(data, "blocking")
            blocking = BlockingSettings(
                dwell=number(
                    blocking_raw, "dwell", "blocking", default=DEFAULT_BLOCKING_DWELL_S, minimum=0.0, exclusive_minimum=True
                )
            )

        sweep_raw = section(data, "sweep", required=False)
        fractions_raw = sweep_raw.get("fractions", SweepSettings.fractions)
        if not isinstance(fractions_raw, (list, tuple)) or not fractions_raw:
            raise ConfigurationError("expected a list of drive fractions", field="sweep.fractions")
        fractions = tuple(
            number({"f": f}, "f", f"sweep.fractions[{i}]", minimum=0.0, maximum=1.0) for i, f in enumerate(fractions_raw)
        )
        sweep = SweepSettings(
            fractions=fractions,
            steps=integer(sweep_raw, "steps", "sweep", default=8, minimum=6),
            dwell=number(sweep_raw, "dwell", "sweep", default=1.0, minimum=0.0, exclusive_minimum=True),
            blocking_dwell=number(sweep_raw, "blocking_dwell", "sweep", default=1.0, minimum=0.0, exclusive_minimum=True),
        )

        analysis_raw = section(data, "analysis", required=False)
        subtract = analysis_raw.get("subtract_background", False)
        if not isinstance(subtract, bool):
            raise ConfigurationError("expected true or false", field="analysis.subtract_background")
        analysis = AnalysisSettings(
            window_ps=integer(analysis_raw, "window_ps", "analysis", default=1000, minimum=1),
            subtract_background=subtract,
            blocking_condition=choice(
                analysis_raw, "blocking_condition", ["H", "V", "L", "R", "+", "-"], "analysis", default="V"
            ),
        )

        try:
            eom = EomConfig.from_dict(section(data, "eom"))
        except DomainError as exc:
            raise ConfigurationError(str(exc), field="eom") from exc

        return cls(
            scenario=str(scenario),
            seed=seed,
            state=state,
            chain=chain,
            interferometer=interferometer,
            source=SourceConfig.from_dict(section(data, "source")),
            qrng=QrngConfig.from_dict(section(data, "qrng", required=False)),
            eom=eom,
            channels=channels,
            clocks=clocks,
            schedule=schedule,
            blocking=blocking,
            sweep=sweep,
            analysis=analysis,
            name=str(data.get("name", "")),
            output_dir=data.get("output_dir"),
            base_dir=base_dir,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "scenario": self.scenario_reference(),
            "seed": self.seed,
            "state": asdict(self.state),
            "chain": asdict(self.chain),
            "interferometer": asdict(self.interferometer),
            "source": self.source.to_dict(),
            "qrng": self.qrng.to_dict(),
            "eom": self.eom.to_dict(),
            "channels": self.channels.to_dict(),
            "clocks": self.clocks.to_dict(),
            "schedule": asdict(self.schedule),
            "blocking": asdict(self.blocking) if self.blocking else None,
            "sweep": {**asdict(self.sweep), "fractions": list(self.sweep.fractions)},
            "analysis": asdict(self.analysis),
            "output_dir": self.output_dir,
        }

    def scenario_reference(self) -> str:
        """Scenario name, or an absolute path when the config points at a file."""
        candidate = Path(self.scenario)
        if candidate.suffix in {".yaml", ".yml"} and self.base_dir is not None and not candidate.is_absolute():
            return str((self.base_dir / candidate).resolve())
        return self.scenario

    def geometry(self) -> ScenarioGeometry:
        return build_scenario(self.scenario_reference())

    def scan_schedule(self) -> InterferometerSchedule:
        return InterferometerSchedule.scan(
            self.schedule.steps,
            self.interferometer.rad_per_step,
            self.schedule.dwell,
            contrast=self.interferometer.contrast,
            phase0=self.interferometer.phase0,
        )

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return replace(self, seed=seed)


def _clock(data: Mapping[str, Any], path: str) -> ClockModel:
    discipline = choice(data, "discipline", [d.value for d in ClockDiscipline], path, default="shared-generator")
    try:
        return ClockModel(
            offset_s=number(data, "offset_s", path, default=0.0, minimum=0.0),
            drift=number(data, "drift", path, default=0.0),
            jitter_sigma_s=number(data, "jitter_sigma_s", path, default=0.0, minimum=0.0),
            discipline=ClockDiscipline(discipline),
            walk_sigma=number(data, "walk_sigma", path, default=0.0, minimum=0.0),
        )
    except DomainError as exc:
        raise ConfigurationError(str(exc), field=path) from exc


def load_experiment_config(path: Union[str, Path]) -> ExperimentConfig:
    """Read a YAML/JSON config; a run manifest is accepted through its ``config`` key."""
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"config file not found: {path}")
    text = path.read_text(encoding="utf-8")
    try:
        data = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigurationError(f"cannot parse {path.name}: {exc}") from exc
    if isinstance(data, Mapping) and isinstance(data.get("config"), Mapping):
        data = data["config"]
    return ExperimentConfig.from_dict(data or {}, base_dir=path.resolve().parent)


__all__ = [
    "AnalysisSettings",
    "BlockingSettings",
    "ExperimentConfig",
    "InterferometerSettings",
    "ScheduleSettings",
    "StateSettings",
    "SweepSettings",
    "load_experiment_config",
]
