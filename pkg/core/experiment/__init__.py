"""Configured experiments and their execution."""

from core.experiment.config import ExperimentConfig, load_experiment_config
from core.experiment.runner import ExperimentRunner, nominal_offset_ps

__all__ = ["ExperimentConfig", "ExperimentRunner", "load_experiment_config", "nominal_offset_ps"]
