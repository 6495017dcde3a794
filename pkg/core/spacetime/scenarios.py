"""Scenario geometry: lab placement, signal delays and the four key events."""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

import yaml

from core import config as app_config
from core.errors import ConfigurationError
from core.spacetime.events import SPEED_OF_LIGHT, ExtendedEvent

logger = logging.getLogger(__name__)

BUNDLED_DIR = Path(__file__).resolve().parent / "scenarios"

MEDIUM_INDEX: Dict[str, float] = {
    "fiber": 1.5,
    "coax": 1.5,
    "free-space": 1.0,
    "vacuum": 1.0,
}

REQUIRED_LABS = ("source", "interferometer", "projection", "qrng")
REQUIRED_SEGMENTS = ("env_link", "sys_delay", "interferometer")
EVENT_LABELS = ("E_se", "I_s", "P_e", "C_e")

# QRNG latency plus three autocorrelation times
DEFAULT_CHOICE_DURATION_S = 108e-9


@dataclass(frozen=True)
class Segment:
    length_m: Optional[float] = None
    medium: Optional[str] = None
    delay_s: Optional[float] = None
    path: str = field(default="segment", compare=False)

    def __post_init__(self) -> None:
        if self.delay_s is None and self.length_m is None:
            raise ConfigurationError("missing distance or delay", field=self.path)
        if self.delay_s is None and self.medium not in MEDIUM_INDEX:
            raise ConfigurationError(
                f"unknown medium '{self.medium}' (known: {', '.join(MEDIUM_INDEX)})", field=f"{self.path}.medium"
            )

    def delay(self, c: float = SPEED_OF_LIGHT) -> float:
        if self.delay_s is not None:
            return self.delay_s
        return self.length_m * MEDIUM_INDEX[self.medium] / c


@dataclass(frozen=True)
class ChoiceTiming:
    center_s: float
    duration_s: float = DEFAULT_CHOICE_DURATION_S


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    labs: Mapping[str, float]
    segments: Mapping[str, Segment]
    choice: ChoiceTiming
    experiment: str = "custom"
    description: str = ""
    samples_per_event: int = 2
    expected: Tuple[Tuple[str, str, str], ...] = ()
    reference: Mapping[str, float] = field(default_factory=dict)
    source_path: Optional[Path] = None

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], source_path: Optional[Path] = None) -> "ScenarioConfig":
        if not isinstance(data, Mapping):
            raise ConfigurationError("scenario file must contain a mapping")
        name = data.get("name")
        if not name:
            raise ConfigurationError("missing", field="name")

        labs_raw = data.get("labs")
        if not isinstance(labs_raw, Mapping):
            raise ConfigurationError("missing lab positions", field="labs")
        labs: Dict[str, float] = {}
        for lab in REQUIRED_LABS:
            if lab not in labs_raw:
                raise ConfigurationError("missing", field=f"labs.{lab}")
        for lab, position in labs_raw.items():
            labs[str(lab)] = _as_float(position, f"labs.{lab}")

        segments_raw = data.get("segments")
        if not isinstance(segments_raw, Mapping):
            raise ConfigurationError("missing segment table", field="segments")
        segments = {
            str(label): _parse_segment(spec, f"segments.{label}") for label, spec in segments_raw.items()
        }
        for label in REQUIRED_SEGMENTS:
            if label not in segments:
                raise ConfigurationError("missing distance or delay", field=f"segments.{label}")

        choice_raw = data.get("choice")
        if not isinstance(choice_raw, Mapping) or "center_s" not in choice_raw:
            raise ConfigurationError("missing", field="choice.center_s")
        choice = ChoiceTiming(
            center_s=_as_float(choice_raw["center_s"], "choice.center_s"),
            duration_s=_as_float(choice_raw.get("duration_s", DEFAULT_CHOICE_DURATION_S), "choice.duration_s"),
        )
        if choice.duration_s < 0:
            raise ConfigurationError("must be nonnegative", field="choice.duration_s")

        expected: List[Tuple[str, str, str]] = []
        for i, row in enumerate(data.get("expected") or []):
            try:
                expected.append((str(row["a"]), str(row["b"]), str(row["relation"])))
            except (KeyError, TypeError) as exc:
                raise ConfigurationError("needs a, b and relation", field=f"expected[{i}]") from exc

        reference = {
            str(key): _as_float(value, f"reference.{key}") for key, value in (data.get("reference") or {}).items()
        }
        samples = int(data.get("samples_per_event", 2))
        if samples < 1:
            raise ConfigurationError("must be at least 1", field="samples_per_event")

        return cls(
            name=str(name),
            labs=labs,
            segments=segments,
            choice=choice,
            experiment=str(data.get("experiment", "custom")),
            description=str(data.get("description", "")).strip(),
            samples_per_event=samples,
            expected=tuple(expected),
            reference=reference,
            source_path=source_path,
        )

    def with_choice_shift(self, shift_s: float) -> "ScenarioConfig":
        """Same scenario with the choice event moved by ``shift_s``."""
        return ScenarioConfig(
            name=f"{self.name}{shift_s:+.3g}s",
            labs=self.labs,
            segments=self.segments,
            choice=ChoiceTiming(self.choice.center_s + shift_s, self.choice.duration_s),
            experiment=self.experiment,
            description=self.description,
            samples_per_event=self.samples_per_event,
            expected=self.expected,
            reference=self.reference,
            source_path=self.source_path,
        )

    def to_dict(self) -> Dict[str, Any]:
        segments = {}
        for label, segment in self.segments.items():
            entry: Dict[str, Any] = {}
            if segment.delay_s is not None:
                entry["delay_s"] = segment.delay_s
            else:
                entry["length_m"] = segment.length_m
                entry["medium"] = segment.medium
            segments[label] = entry
        return {
            "name": self.name,
            "experiment": self.experiment,
            "labs": dict(self.labs),
            "segments": segments,
            "choice": {"center_s": self.choice.center_s, "duration_s": self.choice.duration_s},
            "samples_per_event": self.samples_per_event,
            "expected": [{"a": a, "b": b, "relation": r} for a, b, r in self.expected],
            "reference": dict(self.reference),
        }


@dataclass(frozen=True)
class ScenarioGeometry:
    name: str
    labs: Mapping[str, Tuple[float, float, float]]
    delays: Mapping[str, float]
    events: Mapping[str, ExtendedEvent]
    c: float = SPEED_OF_LIGHT
    config: Optional[ScenarioConfig] = None

    @property
    def system_delay(self) -> float:
        """Emission to system detection: delay fiber plus interferometer transit."""
        return self.delays["sys_delay"] + self.delays["interferometer"]

    @property
    def environment_delay(self) -> float:
        return self.delays["env_link"]

    @property
    def propagation_delta(self) -> float:
        """System arrival minus environment arrival for one pair, lab frame."""
        return self.system_delay - self.environment_delay


def _as_float(value: Any, field_path: str) -> float:
    try:
        return float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"expected a number, got {value!r}", field=field_path) from exc


def _parse_segment(spec: Any, field_path: str) -> Segment:
    if not isinstance(spec, Mapping):
        raise ConfigurationError("expected length_m/medium or delay_s", field=field_path)
    if "delay_s" in spec:
        delay = _as_float(spec["delay_s"], f"{field_path}.delay_s")
        if delay < 0:
            raise ConfigurationError("delay must be nonnegative", field=f"{field_path}.delay_s")
        return Segment(delay_s=delay, path=field_path)
    if "length_m" not in spec:
        raise ConfigurationError("missing distance or delay", field=field_path)
    length = _as_float(spec["length_m"], f"{field_path}.length_m")
    if length < 0:
        raise ConfigurationError("length must be nonnegative", field=f"{field_path}.length_m")
    return Segment(length_m=length, medium=str(spec.get("medium", "fiber")), path=field_path)


def _scenario_dirs() -> List[Path]:
    dirs = [BUNDLED_DIR]
    extra = app_config.settings.scenario_dir
    if extra is not None and extra.is_dir():
        dirs.append(extra)
    return dirs


def _scenario_files() -> Dict[str, Path]:
    files: Dict[str, Path] = {}
    for directory in _scenario_dirs():
        for path in sorted(directory.glob("*.yaml")):
            with open(path, "r", encoding="utf-8") as handle:
                data = yaml.safe_load(handle) or {}
            files[str(data.get("name", path.stem))] = path
    return files


def list_scenarios() -> List[str]:
    return sorted(_scenario_files())


def load_scenario_config(name_or_path: Union[str, Path]) -> ScenarioConfig:
    """Resolve a bundled scenario name or a YAML file path."""
    path = Path(name_or_path)
    if not path.is_file():
        files = _scenario_files()
        if str(name_or_path) not in files:
            raise ConfigurationError(
                f"unknown scenario '{name_or_path}'; available: {', '.join(sorted(files))}",
                field="scenario",
            )
        path = files[str(name_or_path)]
    with open(path, "r", encoding="utf-8") as handle:
        data = yaml.safe_load(handle)
    logger.debug("Loaded scenario from %s", path)
    return ScenarioConfig.from_dict(data, source_path=path)


def build_scenario(config: Union[ScenarioConfig, str, Path], c: float = SPEED_OF_LIGHT) -> ScenarioGeometry:
    """Place the labs on a line and derive E_se, I_s, P_e and C_e."""
    if not isinstance(config, ScenarioConfig):
        config = load_scenario_config(config)

    labs = {label: (x, 0.0, 0.0) for label, x in config.labs.items()}
    delays = {label: segment.delay(c) for label, segment in config.segments.items()}
    n = config.samples_per_event

    source_x = config.labs["source"]
    interferometer_x = config.labs["interferometer"]
    entry = delays["sys_delay"]
    exit_ = entry + delays["interferometer"]
    half_choice = config.choice.duration_s / 2.0

    events = {
        "E_se": ExtendedEvent.point("E_se", source_x, 0.0),
        "I_s": ExtendedEvent.duration("I_s", interferometer_x, entry, exit_, n),
        "P_e": ExtendedEvent.point("P_e", config.labs["projection"], delays["env_link"]),
        "C_e": ExtendedEvent.duration(
            "C_e",
            config.labs["qrng"],
            config.choice.center_s - half_choice,
            config.choice.center_s + half_choice,
            n,
        ),
    }
    return ScenarioGeometry(config.name, labs, delays, events, c, config)


__all__ = [
    "BUNDLED_DIR",
    "ChoiceTiming",
    "MEDIUM_INDEX",
    "ScenarioConfig",
    "ScenarioGeometry",
    "Segment",
    "build_scenario",
    "list_scenarios",
    "load_scenario_config",
]
