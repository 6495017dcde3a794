"""Welcher-weg information, visibility and the complementarity bound."""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

from core.errors import DomainError
from core.quantum.interferometer import (
    SYSTEM_OUTCOMES,
    Blocked,
    InterferometerConfig,
    joint_probabilities,
)
from core.quantum.optics import ChainFactory, chain_basis, extinction_contrast
from core.quantum.state import HybridState

NORMALIZATION_SLACK = 0.05


@dataclass(frozen=True)
class ComplementarityFactors:
    eta_i: float
    eta_v: float

    def __post_init__(self) -> None:
        for name in ("eta_i", "eta_v"):
            value = getattr(self, name)
            if not 0.0 < value <= 1.0:
                raise DomainError(f"{name} must lie in (0, 1], got {value}")


def welcher_weg_parameter(p_a: float, p_b: float) -> float:
    for name, value in (("p_a", p_a), ("p_b", p_b)):
        if not 0.0 <= value <= 1.0:
            raise DomainError(f"{name} must lie in [0, 1], got {value}")
    if abs(p_a + p_b - 1.0) > NORMALIZATION_SLACK:
        raise DomainError(f"path probabilities sum to {p_a + p_b:.4f}, not 1")
    return abs(p_a - p_b)


def visibility_from_extrema(c_max: float, c_min: float) -> float:
    if c_min < 0 or c_max < c_min:
        raise DomainError(f"need c_max >= c_min >= 0, got ({c_max}, {c_min})")
    if c_max + c_min <= 0:
        raise DomainError("visibility undefined for an empty signal")
    return (c_max - c_min) / (c_max + c_min)


def complementarity_bound(i_value: float, factors: ComplementarityFactors) -> float:
    """Largest visibility compatible with a welcher-weg value ``i_value``."""
    if i_value < 0:
        raise DomainError(f"i_value must be nonnegative, got {i_value}")
    if i_value > factors.eta_i:
        raise DomainError(f"i_value {i_value} exceeds eta_i {factors.eta_i}")
    ratio = i_value / factors.eta_i
    return factors.eta_v * math.sqrt(max(0.0, 1.0 - ratio * ratio))


def derive_correction_factors(
    v_hv: float, v_coh: float, pbs_extinction: float, eom_extinction: float
) -> ComplementarityFactors:
    for name, value in (("v_hv", v_hv), ("v_coh", v_coh)):
        if not 0.0 < value <= 1.0:
            raise DomainError(f"{name} must lie in (0, 1], got {value}")
    for name, ratio in (("pbs_extinction", pbs_extinction), ("eom_extinction", eom_extinction)):
        if not ratio > 1.0:
            raise DomainError(f"{name} must exceed 1, got {ratio}")
    eps_pbs = extinction_contrast(pbs_extinction)
    eps_eom = extinction_contrast(eom_extinction)
    return ComplementarityFactors(eta_i=v_hv * eps_pbs, eta_v=v_coh * eps_pbs * eps_eom)


@dataclass(frozen=True)
class PredictedPoint:
    drive: float
    i_value: float
    v_value: float
    latitude_deg: float


def predicted_path_probabilities(
    state: HybridState, chain_factory: ChainFactory, drive: float, port: str = "minus"
) -> Tuple[float, float]:
    """Exact P(a | port), P(b | port) from the two blocking configurations."""
    chain = chain_factory(drive)
    via_a = joint_probabilities(state, InterferometerConfig(blocked=Blocked.PATH_B), chain)
    via_b = joint_probabilities(state, InterferometerConfig(blocked=Blocked.PATH_A), chain)
    n_a = sum(via_a[(sys, port)] for sys in SYSTEM_OUTCOMES)
    n_b = sum(via_b[(sys, port)] for sys in SYSTEM_OUTCOMES)
    if n_a + n_b <= 0:
        raise DomainError(f"no coincidences at port '{port}'")
    return n_a / (n_a + n_b), n_b / (n_a + n_b)


def predicted_visibility(
    state: HybridState,
    chain_factory: ChainFactory,
    drive: float,
    port: str = "minus",
    detector: str = "Det1",
    contrast: float = 1.0,
) -> float:
    """Exact fringe visibility of P(detector, port) versus phase.

    The joint probability is a sinusoid in the phase, so four quadrature
    samples determine its offset and amplitude.
    """
    chain = chain_factory(drive)
    samples = []
    for k in range(4):
        ifm = InterferometerConfig(phase=k * math.pi / 2.0, contrast=contrast)
        samples.append(joint_probabilities(state, ifm, chain)[(detector, port)])
    offset = sum(samples) / 4.0
    amplitude = math.hypot((samples[0] - samples[2]) / 2.0, (samples[1] - samples[3]) / 2.0)
    if offset <= 0:
        raise DomainError(f"no coincidences at port '{port}'")
    return amplitude / offset


def predicted_point(
    state: HybridState,
    chain_factory: ChainFactory,
    drive: float,
    contrast: float = 1.0,
    port: str = "minus",
) -> PredictedPoint:
    p_a, p_b = predicted_path_probabilities(state, chain_factory, drive, port)
    return PredictedPoint(
        drive=drive,
        i_value=abs(p_a - p_b),
        v_value=predicted_visibility(state, chain_factory, drive, port, contrast=contrast),
        latitude_deg=chain_basis(chain_factory(drive)).latitude_deg(port),
    )


def calibrate_contrast(
    state: HybridState,
    chain_factory: ChainFactory,
    drive: float,
    target_visibility: float,
    port: str = "minus",
) -> float:
    """Interferometer contrast that brings the predicted visibility to a target.

    Visibility is linear in the contrast, so one evaluation fixes it.
    """
    full = predicted_visibility(state, chain_factory, drive, port)
    if not 0.0 < target_visibility <= full:
        raise DomainError(
            f"target visibility {target_visibility} unreachable (full contrast gives {full:.4f})"
        )
    return target_visibility / full


def bound_curve(factors: ComplementarityFactors, points: int = 200, i_max: Optional[float] = None):
    """Sampled (I, V_max) pairs along the bound for plotting."""
    top = factors.eta_i if i_max is None else min(i_max, factors.eta_i)
    values = [top * k / (points - 1) for k in range(points)]
    return [(i, complementarity_bound(i, factors)) for i in values]


__all__ = [
    "ComplementarityFactors",
    "PredictedPoint",
    "bound_curve",
    "calibrate_contrast",
    "complementarity_bound",
    "derive_correction_factors",
    "predicted_path_probabilities",
    "predicted_point",
    "predicted_visibility",
    "visibility_from_extrema",
    "welcher_weg_parameter",
]
