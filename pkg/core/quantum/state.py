"""Hybrid path-polarization entangled state with imperfect visibilities."""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from core.errors import DomainError

BASIS_LABELS: Tuple[str, ...] = ("aH", "aV", "bH", "bV")
TOLERANCE = 1e-12

# index = 2 * path + polarization; path a = 0, H = 0
PATH_A, PATH_B = 0, 1
POL_H, POL_V = 0, 1

_Z = np.diag([1.0, -1.0])
HV_CORRELATION = np.kron(_Z, _Z).astype(complex)


def basis_index(path: int, pol: int) -> int:
    return 2 * path + pol


@dataclass(frozen=True, eq=False)
class HybridState:
    """Density operator over {aH, aV, bH, bV}.

    ``v_hv`` is the visibility of the path/polarization correlation read out
    in the H/V basis, ``v_coh`` the visibility in the equatorial (erasure)
    bases. The matrix is checked on construction.
    """

    rho: np.ndarray
    v_hv: float
    v_coh: float

    def __post_init__(self) -> None:
        rho = np.asarray(self.rho, dtype=complex)
        if rho.shape != (4, 4):
            raise DomainError(f"density matrix must be 4x4, got {rho.shape}")
        if abs(np.trace(rho).real - 1.0) > TOLERANCE or abs(np.trace(rho).imag) > TOLERANCE:
            raise DomainError("density matrix trace differs from 1")
        if np.max(np.abs(rho - rho.conj().T)) > TOLERANCE:
            raise DomainError("density matrix is not Hermitian")
        if np.linalg.eigvalsh(rho).min() < -TOLERANCE:
            raise DomainError("density matrix is not positive semidefinite")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @property
    def purity(self) -> float:
        return float(np.trace(self.rho @ self.rho).real)

    @property
    def hv_correlation(self) -> float:
        return float(np.trace(self.rho @ HV_CORRELATION).real)

    @property
    def coherence(self) -> complex:
        """The aH-bV off-diagonal element."""
        return complex(self.rho[basis_index(PATH_A, POL_H), basis_index(PATH_B, POL_V)])

    def populations(self) -> dict:
        return {label: float(self.rho[i, i].real) for i, label in enumerate(BASIS_LABELS)}

    def dephased(self, contrast: float) -> "HybridState":
        """Scale every path coherence by ``contrast``.

        Models an interferometer whose two arms overlap imperfectly.
        """
        if not 0.0 <= contrast <= 1.0:
            raise DomainError(f"contrast must lie in [0, 1], got {contrast}")
        if contrast == 1.0:
            return self
        paths = np.array([0, 0, 1, 1])
        mask = np.where(paths[:, None] == paths[None, :], 1.0, contrast)
        return HybridState(self.rho * mask, self.v_hv, self.v_coh * contrast)


def make_hybrid_state(v_hv: float, v_coh: float) -> HybridState:
    """Build the imperfect state (|aH> + |bV>)/sqrt(2).

    Populations are (1 +/- v_hv)/4 and the aH-bV coherence is v_coh/2 with
    zero phase, which makes (1, 1) the pure state and keeps the erasure
    fringe visibility equal to v_coh.
    """
    for name, value in (("v_hv", v_hv), ("v_coh", v_coh)):
        if not np.isfinite(value) or not 0.0 <= value <= 1.0:
            raise DomainError(f"{name} must lie in [0, 1], got {value}")
    if v_coh > (1.0 + v_hv) / 2.0 + TOLERANCE:
        raise DomainError(
            f"v_coh={v_coh} exceeds (1 + v_hv)/2={(1.0 + v_hv) / 2.0}; state would not be positive"
        )

    rho = np.zeros((4, 4), dtype=complex)
    correlated = (1.0 + v_hv) / 4.0
    anticorrelated = (1.0 - v_hv) / 4.0
    a_h = basis_index(PATH_A, POL_H)
    a_v = basis_index(PATH_A, POL_V)
    b_h = basis_index(PATH_B, POL_H)
    b_v = basis_index(PATH_B, POL_V)
    rho[a_h, a_h] = correlated
    rho[b_v, b_v] = correlated
    rho[a_v, a_v] = anticorrelated
    rho[b_h, b_h] = anticorrelated
    rho[a_h, b_v] = v_coh / 2.0
    rho[b_v, a_h] = v_coh / 2.0
    return HybridState(rho, float(v_hv), float(v_coh))


def ideal_state() -> HybridState:
    return make_hybrid_state(1.0, 1.0)


__all__ = [
    "BASIS_LABELS",
    "HV_CORRELATION",
    "HybridState",
    "basis_index",
    "ideal_state",
    "make_hybrid_state",
]
