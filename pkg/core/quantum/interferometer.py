"""System-photon interferometer and joint outcome probabilities."""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, Mapping, Optional, Tuple

import numpy as np

from core.errors import DomainError
from core.quantum.optics import MeasurementChain
from core.quantum.state import HybridState

SYSTEM_OUTCOMES: Tuple[str, ...] = ("Det1", "Det2")
ENV_OUTCOMES: Tuple[str, ...] = ("plus", "minus")
NO_CLICK = "no-click"

BEAM_SPLITTER = np.array([[1.0, 1.0j], [1.0j, 1.0]], dtype=complex) / math.sqrt(2.0)


class Blocked(str, Enum):
    NONE = "none"
    PATH_A = "path-a"
    PATH_B = "path-b"


@dataclass(frozen=True)
class InterferometerConfig:
    """Phase setting, blocking state and mode contrast of the system interferometer."""

    phase: float = 0.0
    blocked: Blocked = Blocked.NONE
    contrast: float = 1.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.phase):
            raise DomainError("interferometer phase must be finite")
        try:
            object.__setattr__(self, "blocked", Blocked(self.blocked))
        except ValueError as exc:
            raise DomainError(f"invalid blocked value '{self.blocked}'") from exc
        if not 0.0 <= self.contrast <= 1.0:
            raise DomainError(f"contrast must lie in [0, 1], got {self.contrast}")

    def with_phase(self, phase: float) -> "InterferometerConfig":
        return InterferometerConfig(phase, self.blocked, self.contrast)

    def with_blocked(self, blocked: Blocked) -> "InterferometerConfig":
        return InterferometerConfig(self.phase, blocked, self.contrast)


def system_operator(ifm: InterferometerConfig) -> np.ndarray:
    """Path operator: block, then phase on path b, then the beam splitter.

    Rows are the output detectors (Det1, Det2). The operator is not unitary
    when a path is blocked; the missing norm is the no-click probability.
    """
    block = np.eye(2, dtype=complex)
    if ifm.blocked is Blocked.PATH_A:
        block[0, 0] = 0.0
    elif ifm.blocked is Blocked.PATH_B:
        block[1, 1] = 0.0
    phase = np.diag([1.0, np.exp(1j * ifm.phase)])
    return BEAM_SPLITTER @ phase @ block


@dataclass(frozen=True)
class ProbabilityTable:
    """Joint outcome probabilities keyed by (system outcome, environment port).

    The system outcome ``no-click`` carries the mass of photons removed by a
    blocked path.
    """

    p: Mapping[Tuple[str, str], float]

    def __post_init__(self) -> None:
        for key, value in self.p.items():
            if not -1e-12 <= value <= 1.0 + 1e-12:
                raise DomainError(f"probability {key} = {value} outside [0, 1]")

    def __getitem__(self, key: Tuple[str, str]) -> float:
        return self.p[key]

    @property
    def total(self) -> float:
        return float(sum(self.p.values()))

    @property
    def no_click(self) -> float:
        return float(sum(self.p[(NO_CLICK, env)] for env in ENV_OUTCOMES))

    def environment_marginal(self, env: str) -> float:
        return float(sum(self.p[(sys, env)] for sys in SYSTEM_OUTCOMES + (NO_CLICK,)))

    def system_marginal(self, sys: str) -> float:
        return float(sum(self.p[(sys, env)] for env in ENV_OUTCOMES))

    def conditional(self, env: str) -> Dict[str, float]:
        """P(system detector | environment port) renormalized over clicks."""
        clicks = sum(self.p[(sys, env)] for sys in SYSTEM_OUTCOMES)
        if clicks <= 0.0:
            raise DomainError(f"no coincidence probability for environment port '{env}'")
        return {sys: self.p[(sys, env)] / clicks for sys in SYSTEM_OUTCOMES}

    def keys_in_order(self) -> Tuple[Tuple[str, str], ...]:
        return tuple((sys, env) for env in ENV_OUTCOMES for sys in SYSTEM_OUTCOMES + (NO_CLICK,))

    def as_array(self) -> np.ndarray:
        return np.array([self.p[key] for key in self.keys_in_order()])


def joint_probabilities(
    state: HybridState, ifm: InterferometerConfig, chain: MeasurementChain
) -> ProbabilityTable:
    """trace(rho . Pi_s (x) Pi_e) for every detector pair."""
    rho = state.dephased(ifm.contrast).rho
    operator = system_operator(ifm)
    env_projectors = chain.effective_projectors()

    table: Dict[Tuple[str, str], float] = {}
    for env, pi_e in env_projectors.items():
        clicked = 0.0
        for row, sys in enumerate(SYSTEM_OUTCOMES):
            ket = operator[row]
            pi_s = np.outer(ket.conj(), ket)
            value = float(np.trace(rho @ np.kron(pi_s, pi_e)).real)
            table[(sys, env)] = max(value, 0.0)
            clicked += table[(sys, env)]
        env_total = float(np.trace(rho @ np.kron(np.eye(2), pi_e)).real)
        table[(NO_CLICK, env)] = max(env_total - clicked, 0.0)
    return ProbabilityTable(table)


def conditional_fringes(
    state: HybridState,
    chain: MeasurementChain,
    phases: Iterable[float],
    ifm: Optional[InterferometerConfig] = None,
) -> Dict[str, np.ndarray]:
    """P(Det1 | environment port) along a phase scan."""
    template = ifm or InterferometerConfig()
    phases = list(phases)
    fringes = {env: np.empty(len(phases)) for env in ENV_OUTCOMES}
    for i, phi in enumerate(phases):
        table = joint_probabilities(state, template.with_phase(phi), chain)
        for env in ENV_OUTCOMES:
            fringes[env][i] = table.conditional(env)["Det1"]
    return fringes


__all__ = [
    "BEAM_SPLITTER",
    "Blocked",
    "ENV_OUTCOMES",
    "InterferometerConfig",
    "NO_CLICK",
    "ProbabilityTable",
    "SYSTEM_OUTCOMES",
    "conditional_fringes",
    "joint_probabilities",
    "system_operator",
]
