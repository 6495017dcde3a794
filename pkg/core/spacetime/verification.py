"""Compare computed causal relations against a scenario's expected table."""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

import pandas as pd

from core.errors import ConfigurationError, DomainError, UnboundedSpeedError
from core.spacetime.events import Relation, min_required_signal_speed, relate_extended
from core.spacetime.scenarios import ScenarioGeometry

logger = logging.getLogger(__name__)

CHECKED_PAIRS: Tuple[Tuple[str, str], ...] = (("P_e", "I_s"), ("I_s", "C_e"), ("E_se", "C_e"))


class RelationMatrix:
    """Relations between labelled events, stored with their inverses."""

    def __init__(self, entries: Optional[Mapping[Tuple[str, str], Relation]] = None):
        self._entries: Dict[Tuple[str, str], Relation] = {}
        for (a, b), relation in (entries or {}).items():
            self.set(a, b, relation)

    def set(self, a: str, b: str, relation: Relation) -> None:
        relation = Relation(relation)
        existing = self._entries.get((a, b))
        if existing is not None and existing is not relation:
            raise ConfigurationError(f"conflicting relations for ({a}, {b}): {existing.value} and {relation.value}")
        self._entries[(a, b)] = relation
        self._entries[(b, a)] = relation.inverse()

    def get(self, a: str, b: str) -> Optional[Relation]:
        return self._entries.get((a, b))

    def covers(self, pairs: Iterable[Tuple[str, str]]) -> bool:
        return all(pair in self._entries for pair in pairs)

    @property
    def entries(self) -> Dict[Tuple[str, str], Relation]:
        return dict(self._entries)

    @classmethod
    def from_rows(cls, rows: Iterable[Tuple[str, str, str]]) -> "RelationMatrix":
        matrix = cls()
        for a, b, relation in rows:
            try:
                matrix.set(a, b, Relation(relation))
            except ValueError as exc:
                raise ConfigurationError(f"unknown relation '{relation}' for ({a}, {b})") from exc
        return matrix


def compute_relations(
    geometry: ScenarioGeometry, pairs: Iterable[Tuple[str, str]] = CHECKED_PAIRS
) -> RelationMatrix:
    matrix = RelationMatrix()
    for a, b in pairs:
        matrix.set(a, b, relate_extended(geometry.events[a], geometry.events[b], geometry.c))
    return matrix


@dataclass(frozen=True)
class PairCheck:
    a: str
    b: str
    expected: Relation
    actual: Relation

    @property
    def passed(self) -> bool:
        return self.expected is self.actual


@dataclass(frozen=True)
class VerificationReport:
    scenario: str
    checks: Tuple[PairCheck, ...]
    choice_speed: Optional[float] = None
    choice_delay_after_interference: Optional[float] = None

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> List[PairCheck]:
        return [check for check in self.checks if not check.passed]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {
                    "scenario": self.scenario,
                    "a": check.a,
                    "b": check.b,
                    "expected": check.expected.value,
                    "actual": check.actual.value,
                    "status": "PASS" if check.passed else "FAIL",
                }
                for check in self.checks
            ]
        )

    def to_dict(self) -> Dict[str, object]:
        return {
            "scenario": self.scenario,
            "passed": self.passed,
            "checks": self.to_frame().to_dict(orient="records"),
            "choice_speed_c": self.choice_speed,
            "choice_delay_after_interference_s": self.choice_delay_after_interference,
        }


def choice_signal_speed(geometry: ScenarioGeometry) -> Optional[float]:
    """Least superluminal speed a C_e -> I_s signal would need, if any ordering allows one."""
    try:
        return min_required_signal_speed(geometry.events["C_e"], geometry.events["I_s"], geometry.c)
    except UnboundedSpeedError:
        return None


def choice_delay(geometry: ScenarioGeometry) -> float:
    """Lab-frame time from the middle of I_s to the middle of C_e."""
    choice = geometry.events["C_e"]
    interference = geometry.events["I_s"]
    return (choice.start + choice.end) / 2.0 - (interference.start + interference.end) / 2.0


def verify_scenario(geometry: ScenarioGeometry, expected: Optional[RelationMatrix] = None) -> VerificationReport:
    """Recompute the three checked relations and diff them against ``expected``.

    When ``expected`` is omitted the table bundled with the scenario is used.
    """
    if expected is None:
        if geometry.config is None or not geometry.config.expected:
            raise DomainError(f"scenario {geometry.name} carries no expected relations")
        expected = RelationMatrix.from_rows(geometry.config.expected)
    if not expected.covers(CHECKED_PAIRS):
        raise DomainError("expected relations must cover (P_e, I_s), (I_s, C_e) and (E_se, C_e)")

    actual = compute_relations(geometry)
    checks = tuple(
        PairCheck(a, b, expected.get(a, b), actual.get(a, b)) for a, b in CHECKED_PAIRS
    )
    report = VerificationReport(
        scenario=geometry.name,
        checks=checks,
        choice_speed=choice_signal_speed(geometry),
        choice_delay_after_interference=choice_delay(geometry),
    )
    for failure in report.failures:
        logger.info(
            "%s: (%s, %s) expected %s, computed %s",
            geometry.name,
            failure.a,
            failure.b,
            failure.expected.value,
            failure.actual.value,
        )
    return report


__all__ = [
    "CHECKED_PAIRS",
    "PairCheck",
    "RelationMatrix",
    "VerificationReport",
    "choice_delay",
    "choice_signal_speed",
    "compute_relations",
    "verify_scenario",
]
