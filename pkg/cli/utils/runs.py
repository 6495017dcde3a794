"""On-disk layout of simulated runs."""

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from core.analysis.protocol import RunKind, blocking_schedules
from core.experiment.config import ExperimentConfig, load_experiment_config
from core.experiment.runner import ExperimentRunner, nominal_offset_ps
from core.instrument.schedule import InterferometerSchedule
from core.timetag.io import read_stream, write_stream
from core.timetag.model import TimeTagStream

MANIFEST = "manifest.json"
SYSTEM_FILE = "system.tags"
ENVIRONMENT_FILE = "environment.tags"
# directory -> run kind; "blocked-a" has path a blocked
RUN_DIRS = {"scan": RunKind.SCAN, "blocked-a": RunKind.BLOCK_PATH_A, "blocked-b": RunKind.BLOCK_PATH_B}


def planned_runs(config: ExperimentConfig) -> List[Tuple[str, InterferometerSchedule]]:
    runs = [("scan", config.scan_schedule())]
    if config.blocking is not None:
        block_b, block_a = blocking_schedules(config.blocking.dwell, config.interferometer.contrast)
        runs += [("blocked-a", block_a), ("blocked-b", block_b)]
    return runs


def run_record(name: str, schedule: InterferometerSchedule, system: TimeTagStream, environment: TimeTagStream) -> Dict[str, Any]:
    return {
        "run_key": [int(RUN_DIRS[name])],
        "blocked": schedule.blocked.value,
        "steps": [s.step for s in schedule.steps],
        "phases": [s.phase for s in schedule.steps],
        "dwell": [s.dwell for s in schedule.steps],
        "system": f"{name}/{SYSTEM_FILE}",
        "environment": f"{name}/{ENVIRONMENT_FILE}",
        "system_tags": len(system),
        "environment_tags": len(environment),
    }


def simulate_to_disk(
    config: ExperimentConfig, out_dir: Path, runner: Optional[ExperimentRunner] = None, progress=None, task=None
) -> Dict[str, Any]:
    """Simulate every planned run into ``out_dir`` and return the manifest."""
    runner = runner or ExperimentRunner()
    geometry = config.geometry()
    runs: Dict[str, Any] = {}
    for name, schedule in planned_runs(config):
        if progress is not None and task is not None:
            progress.update(task, description=f"Simulating {name} ({schedule.duration:g} s)...")
        system, environment = runner.simulate(config, schedule, (int(RUN_DIRS[name]),))
        write_stream(system, out_dir / name / SYSTEM_FILE)
        write_stream(environment, out_dir / name / ENVIRONMENT_FILE)
        runs[name] = run_record(name, schedule, system, environment)
    return {
        "config": config.to_dict(),
        "seed": config.seed,
        "scenario": geometry.name,
        "nominal_offset_ps": nominal_offset_ps(config),
        "propagation_delta_s": geometry.propagation_delta,
        "runs": runs,
    }


@dataclass(frozen=True)
class LoadedRun:
    name: str
    system: TimeTagStream
    environment: TimeTagStream
    record: Dict[str, Any]


def load_run(run_dir: Path, manifest: Dict[str, Any], name: str) -> Optional[LoadedRun]:
    record = manifest.get("runs", {}).get(name)
    if record is None:
        return None
    return LoadedRun(
        name=name,
        system=read_stream(run_dir / record["system"]),
        environment=read_stream(run_dir / record["environment"]),
        record=record,
    )


def manifest_config(run_dir: Path) -> ExperimentConfig:
    return load_experiment_config(run_dir / MANIFEST)


__all__ = [
    "ENVIRONMENT_FILE",
    "LoadedRun",
    "MANIFEST",
    "RUN_DIRS",
    "SYSTEM_FILE",
    "load_run",
    "manifest_config",
    "planned_runs",
    "simulate_to_disk",
]
