import math

import numpy as np
import pytest

from core.errors import DomainError
from core.quantum.optics import (
    BASIS_DIAGONAL,
    BASIS_HV,
    BASIS_RL,
    RIGHT,
    ChainSpec,
    MeasurementChain,
    PolarizationBasis,
    Retarder,
    canaries_chain,
    chain_basis,
    extinction_contrast,
    vienna_chain,
)


def test_vienna_chain_without_voltage_analyzes_hv():
    assert chain_basis(vienna_chain(0.0)).equivalent(BASIS_HV)


def test_vienna_chain_at_quarter_voltage_sends_r_to_minus_port():
    basis = chain_basis(vienna_chain(1.0))
    assert basis.equivalent(BASIS_RL)
    assert abs(np.vdot(basis.jones_minus, RIGHT)) == pytest.approx(1.0, abs=1e-12)


def test_vienna_half_drive_matches_direct_jones_product():
    # retarder at 45 degrees, retardance pi/4: rotate, delay, rotate back
    c = 1 / math.sqrt(2)
    r = np.array([[c, c], [-c, c]])
    plate = np.diag([1.0, np.exp(-1j * math.pi / 4)])
    m = r.T @ plate @ r
    minus = m.conj().T @ np.array([0.0, 1.0])
    basis = chain_basis(vienna_chain(0.5))
    assert abs(np.vdot(basis.jones_minus, minus)) == pytest.approx(1.0, abs=1e-12)
    assert basis.latitude_deg() == pytest.approx(45.0, abs=1e-9)


@pytest.mark.parametrize("drive", [0.0, 0.25, 0.5, 0.75, 1.0])
def test_vienna_latitude_falls_linearly_with_drive(drive):
    assert chain_basis(vienna_chain(drive)).latitude_deg() == pytest.approx(90.0 * (1.0 - drive), abs=1e-9)


def test_canaries_chain_switches_between_hv_and_diagonal():
    assert chain_basis(canaries_chain(-1.0)).equivalent(BASIS_HV)
    assert chain_basis(canaries_chain(1.0)).equivalent(BASIS_DIAGONAL)


def test_extinction_contrast():
    assert extinction_contrast(180) == pytest.approx(179 / 181)
    assert extinction_contrast(math.inf) == 1.0


def test_leakage_applies_eom_ratio_only_when_driven():
    off = vienna_chain(0.0, 180, 250)
    on = vienna_chain(1.0, 180, 250)
    assert off.leakage_contrast == pytest.approx(179 / 181)
    assert on.leakage_contrast == pytest.approx(179 / 181 * 249 / 251)


def test_effective_projectors_sum_to_identity():
    projectors = canaries_chain(1.0).effective_projectors()
    assert np.allclose(projectors["plus"] + projectors["minus"], np.eye(2), atol=1e-12)


def test_invalid_chain_parameters():
    with pytest.raises(DomainError):
        MeasurementChain((Retarder(math.pi / 2, 45.0, driven=True),), pbs_extinction=1.0)
    with pytest.raises(DomainError):
        MeasurementChain((Retarder(math.inf, 0.0),))
    with pytest.raises(DomainError):
        vienna_chain(1.5)
    with pytest.raises(DomainError):
        ChainSpec(preset="tokyo")


def test_basis_requires_orthonormal_vectors():
    with pytest.raises(DomainError):
        PolarizationBasis(np.array([1.0, 0.0]), np.array([1.0, 0.0]))
    with pytest.raises(DomainError):
        PolarizationBasis(np.array([1.0, 1.0]), np.array([0.0, 1.0]))


def test_chain_spec_off_drive():
    assert ChainSpec("vienna").off_drive == 0.0
    assert ChainSpec("canaries").off_drive == -1.0
    assert ChainSpec("canaries", 180, 250).at(-1.0).leakage_contrast == pytest.approx(179 / 181 * 249 / 251)
