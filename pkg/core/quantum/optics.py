"""Jones calculus for the environment photon's projection setup."""

import math
from dataclasses import dataclass
from typing import Callable, Dict, Tuple

import numpy as np

from core.errors import DomainError

TOLERANCE = 1e-12
QUARTER_WAVE = math.pi / 2.0

H = np.array([1.0, 0.0], dtype=complex)
V = np.array([0.0, 1.0], dtype=complex)
DIAGONAL = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)
ANTIDIAGONAL = np.array([1.0, -1.0], dtype=complex) / math.sqrt(2.0)
# R is the state whose projection leaves the system photon in (|a> - i|b>)/sqrt(2)
RIGHT = np.array([1.0, 1.0j], dtype=complex) / math.sqrt(2.0)
LEFT = np.array([1.0, -1.0j], dtype=complex) / math.sqrt(2.0)


def rotation(angle_rad: float) -> np.ndarray:
    c, s = math.cos(angle_rad), math.sin(angle_rad)
    return np.array([[c, s], [-s, c]], dtype=complex)


def retarder_matrix(retardance: float, angle_deg: float) -> np.ndarray:
    """Linear retarder with its fast axis at ``angle_deg``."""
    theta = math.radians(angle_deg)
    plate = np.array([[1.0, 0.0], [0.0, np.exp(-1j * retardance)]], dtype=complex)
    return rotation(-theta) @ plate @ rotation(theta)


def extinction_contrast(ratio: float) -> float:
    """(r - 1)/(r + 1); an infinite ratio is a perfect analyzer."""
    if math.isinf(ratio):
        return 1.0
    return (ratio - 1.0) / (ratio + 1.0)


@dataclass(frozen=True, eq=False)
class PolarizationBasis:
    """The two orthogonal analyzer states behind the PBS outputs.

    ``jones_plus`` is registered at the transmitted port (Det3) and
    ``jones_minus`` at the reflected port (Det4).
    """

    jones_plus: np.ndarray
    jones_minus: np.ndarray

    def __post_init__(self) -> None:
        plus = np.asarray(self.jones_plus, dtype=complex)
        minus = np.asarray(self.jones_minus, dtype=complex)
        for name, vec in (("jones_plus", plus), ("jones_minus", minus)):
            if vec.shape != (2,):
                raise DomainError(f"{name} must be a 2-vector")
            if abs(np.linalg.norm(vec) - 1.0) > TOLERANCE:
                raise DomainError(f"{name} is not normalized")
        if abs(np.vdot(plus, minus)) > TOLERANCE:
            raise DomainError("analyzer states are not orthogonal")
        object.__setattr__(self, "jones_plus", plus)
        object.__setattr__(self, "jones_minus", minus)

    def projector(self, port: str) -> np.ndarray:
        vec = self.jones_plus if port == "plus" else self.jones_minus
        return np.outer(vec, vec.conj())

    def equivalent(self, other: "PolarizationBasis", tol: float = 1e-9) -> bool:
        """True when both ports project onto the same states up to a global phase."""
        return (
            abs(abs(np.vdot(self.jones_plus, other.jones_plus)) - 1.0) < tol
            and abs(abs(np.vdot(self.jones_minus, other.jones_minus)) - 1.0) < tol
        )

    def stokes(self, port: str = "minus") -> Tuple[float, float, float]:
        """Normalized Stokes vector (S1, S2, S3) of one analyzer state."""
        ex, ey = self.jones_plus if port == "plus" else self.jones_minus
        s1 = abs(ex) ** 2 - abs(ey) ** 2
        s2 = 2.0 * (ex.conjugate() * ey).real
        s3 = -2.0 * (ex.conjugate() * ey).imag
        return float(s1), float(s2), float(s3)

    def latitude_deg(self, port: str = "minus") -> float:
        """Angle of the analyzer state above the equator holding R/L and +/-.

        The H/V poles sit at 90 degrees.
        """
        s1, s2, s3 = self.stokes(port)
        return math.degrees(math.atan2(abs(s1), math.hypot(s2, s3)))


BASIS_HV = PolarizationBasis(H, V)
BASIS_RL = PolarizationBasis(LEFT, RIGHT)
BASIS_DIAGONAL = PolarizationBasis(DIAGONAL, ANTIDIAGONAL)

NAMED_BASES: Dict[str, PolarizationBasis] = {
    "H/V": BASIS_HV,
    "R/L": BASIS_RL,
    "+/-": BASIS_DIAGONAL,
}


@dataclass(frozen=True)
class Retarder:
    """A wave plate or an EOM crystal.

    For a driven element ``retardance`` is the value at full drive and the
    effective retardance scales linearly with the chain's drive fraction.
    """

    retardance: float
    angle_deg: float
    driven: bool = False
    name: str = ""

    def matrix(self, drive: float) -> np.ndarray:
        delta = self.retardance * drive if self.driven else self.retardance
        return retarder_matrix(delta, self.angle_deg)


@dataclass(frozen=True)
class MeasurementChain:
    """Ordered retarders in front of the PBS, in the order light meets them."""

    elements: Tuple[Retarder, ...]
    pbs_extinction: float = 180.0
    eom_extinction: float = 250.0
    drive: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "elements", tuple(self.elements))
        for name in ("pbs_extinction", "eom_extinction"):
            ratio = getattr(self, name)
            if not ratio > 1.0:
                raise DomainError(f"{name} must exceed 1, got {ratio}")
        for element in self.elements:
            if not math.isfinite(element.retardance):
                raise DomainError(f"retardance of {element.name or 'element'} is not finite")
        if not -1.0 <= self.drive <= 1.0:
            raise DomainError(f"drive must lie in [-1, 1], got {self.drive}")

    @property
    def eom_active(self) -> bool:
        return self.drive != 0.0 and any(element.driven for element in self.elements)

    @property
    def leakage_contrast(self) -> float:
        """Combined analyzer contrast from the PBS and, when driven, the EOM."""
        contrast = extinction_contrast(self.pbs_extinction)
        if self.eom_active:
            contrast *= extinction_contrast(self.eom_extinction)
        return contrast

    def jones(self) -> np.ndarray:
        total = np.eye(2, dtype=complex)
        for element in self.elements:
            total = element.matrix(self.drive) @ total
        return total

    def with_drive(self, drive: float) -> "MeasurementChain":
        return MeasurementChain(self.elements, self.pbs_extinction, self.eom_extinction, drive)

    def effective_projectors(self) -> Dict[str, np.ndarray]:
        """Analyzer projectors mixed by extinction leakage."""
        basis = chain_basis(self)
        eps = self.leakage_contrast
        plus = basis.projector("plus")
        minus = basis.projector("minus")
        return {
            "plus": 0.5 * (1.0 + eps) * plus + 0.5 * (1.0 - eps) * minus,
            "minus": 0.5 * (1.0 + eps) * minus + 0.5 * (1.0 - eps) * plus,
        }


def chain_basis(chain: MeasurementChain) -> PolarizationBasis:
    """Effective analysis basis of a chain at its drive.

    A photon leaves the PBS at a port with probability |<e_port|M|psi>|^2,
    so the analyzer states are M^dagger applied to the PBS eigenstates.
    """
    adjoint = chain.jones().conj().T
    plus = adjoint @ H
    minus = adjoint @ V
    return PolarizationBasis(plus / np.linalg.norm(plus), minus / np.linalg.norm(minus))


def vienna_chain(drive: float = 0.0, pbs_extinction: float = 180.0, eom_extinction: float = 250.0) -> MeasurementChain:
    """EOM at 45 degrees: identity at zero voltage, a QWP at +QV."""
    eom = Retarder(QUARTER_WAVE, 45.0, driven=True, name="eom")
    return MeasurementChain((eom,), pbs_extinction, eom_extinction, drive)


def canaries_chain(drive: float = -1.0, pbs_extinction: float = 180.0, eom_extinction: float = 250.0) -> MeasurementChain:
    """QWP at 22.5 degrees followed by an EOM with parallel axis.

    -QV compensates the QWP (H/V analysis); +QV adds to a HWP at 22.5
    degrees (+/- analysis).
    """
    qwp = Retarder(QUARTER_WAVE, 22.5, name="qwp")
    eom = Retarder(QUARTER_WAVE, 22.5, driven=True, name="eom")
    return MeasurementChain((qwp, eom), pbs_extinction, eom_extinction, drive)


ChainFactory = Callable[[float], MeasurementChain]

CHAIN_PRESETS: Dict[str, Callable[..., MeasurementChain]] = {
    "vienna": vienna_chain,
    "canaries": canaries_chain,
}


@dataclass(frozen=True)
class ChainSpec:
    """Named chain preset plus its analyzer extinction ratios."""

    preset: str = "vienna"
    pbs_extinction: float = 180.0
    eom_extinction: float = 250.0

    def __post_init__(self) -> None:
        if self.preset not in CHAIN_PRESETS:
            raise DomainError(f"unknown chain preset '{self.preset}' (known: {', '.join(CHAIN_PRESETS)})")

    def at(self, drive: float) -> MeasurementChain:
        return CHAIN_PRESETS[self.preset](drive, self.pbs_extinction, self.eom_extinction)

    @property
    def off_drive(self) -> float:
        """Drive that selects the H/V (welcher-weg) setting."""
        return -1.0 if self.preset == "canaries" else 0.0


__all__ = [
    "BASIS_DIAGONAL",
    "BASIS_HV",
    "BASIS_RL",
    "CHAIN_PRESETS",
    "ChainFactory",
    "ChainSpec",
    "MeasurementChain",
    "NAMED_BASES",
    "PolarizationBasis",
    "Retarder",
    "canaries_chain",
    "chain_basis",
    "extinction_contrast",
    "retarder_matrix",
    "vienna_chain",
]
