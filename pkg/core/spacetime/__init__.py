"""Spacetime events, scenario geometry and causal verification."""

from core.spacetime.events import (
    SPEED_OF_LIGHT,
    ExtendedEvent,
    IntervalClass,
    Relation,
    SpacetimeEvent,
    boost_event,
    classify_interval,
    min_required_signal_speed,
    relate_extended,
    required_signal_speed,
)
from core.spacetime.scenarios import (
    ScenarioConfig,
    ScenarioGeometry,
    build_scenario,
    list_scenarios,
    load_scenario_config,
)
from core.spacetime.verification import RelationMatrix, VerificationReport, verify_scenario

__all__ = [
    "ExtendedEvent",
    "IntervalClass",
    "Relation",
    "RelationMatrix",
    "SPEED_OF_LIGHT",
    "ScenarioConfig",
    "ScenarioGeometry",
    "SpacetimeEvent",
    "VerificationReport",
    "boost_event",
    "build_scenario",
    "classify_interval",
    "list_scenarios",
    "load_scenario_config",
    "min_required_signal_speed",
    "relate_extended",
    "required_signal_speed",
    "verify_scenario",
]
