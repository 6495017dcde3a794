"""Shared fixtures: shipped configs at desk-scale durations."""

from dataclasses import replace
from pathlib import Path

import pytest

from core.experiment.config import BlockingSettings, ExperimentConfig, load_experiment_config
from core.experiment.runner import ExperimentRunner

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def load_config(name: str) -> ExperimentConfig:
    return load_experiment_config(CONFIG_DIR / f"{name}.yaml")


def shortened(config: ExperimentConfig, dwell: float, blocking_dwell: float = None) -> ExperimentConfig:
    """Same experiment with shorter scan steps and blocking runs."""
    blocking = config.blocking
    if blocking_dwell is not None:
        blocking = BlockingSettings(dwell=blocking_dwell)
    return replace(config, schedule=replace(config.schedule, dwell=dwell), blocking=blocking)


@pytest.fixture(scope="session")
def runner() -> ExperimentRunner:
    return ExperimentRunner()


@pytest.fixture(scope="session")
def vienna_config() -> ExperimentConfig:
    return load_config("vienna-II")


@pytest.fixture(scope="session")
def sweep_config() -> ExperimentConfig:
    return load_config("vienna-sweep")
