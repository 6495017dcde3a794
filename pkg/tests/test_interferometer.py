import math

import numpy as np
import pytest

from core.errors import DomainError
from core.quantum.complementarity import (
    ComplementarityFactors,
    bound_curve,
    calibrate_contrast,
    complementarity_bound,
    derive_correction_factors,
    predicted_point,
    predicted_visibility,
    visibility_from_extrema,
    welcher_weg_parameter,
)
from core.quantum.interferometer import (
    NO_CLICK,
    Blocked,
    InterferometerConfig,
    conditional_fringes,
    joint_probabilities,
)
from core.quantum.optics import ChainSpec, canaries_chain, vienna_chain
from core.quantum.state import ideal_state, make_hybrid_state

PERFECT = ChainSpec("vienna", math.inf, math.inf)


def test_ideal_erasure_basis_at_zero_phase():
    table = joint_probabilities(ideal_state(), InterferometerConfig(0.0), PERFECT.at(1.0))
    assert table[("Det1", "minus")] == pytest.approx(0.5, abs=1e-12)
    assert table[("Det2", "minus")] == pytest.approx(0.0, abs=1e-12)
    assert table[("Det1", "plus")] == pytest.approx(0.0, abs=1e-12)
    assert table[("Det2", "plus")] == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("phase", np.linspace(0, 2 * np.pi, 7))
def test_ideal_welcher_weg_basis_shows_no_fringe(phase):
    table = joint_probabilities(ideal_state(), InterferometerConfig(phase), PERFECT.at(0.0))
    for sys in ("Det1", "Det2"):
        for env in ("plus", "minus"):
            assert table[(sys, env)] == pytest.approx(0.25, abs=1e-12)


def test_blocked_path_moves_mass_to_no_click():
    table = joint_probabilities(ideal_state(), InterferometerConfig(blocked=Blocked.PATH_B), PERFECT.at(0.0))
    assert table[("Det1", "minus")] + table[("Det2", "minus")] == pytest.approx(0.0, abs=1e-12)
    assert table[(NO_CLICK, "minus")] == pytest.approx(0.5, abs=1e-12)
    assert table.total == pytest.approx(1.0, abs=1e-12)


def test_tables_normalize_over_random_configurations():
    rng = np.random.default_rng(5)
    for _ in range(150):
        v_hv = rng.random()
        state = make_hybrid_state(v_hv, rng.random() * (1 + v_hv) / 2)
        ifm = InterferometerConfig(
            phase=rng.uniform(-10, 10), blocked=list(Blocked)[rng.integers(3)], contrast=rng.random()
        )
        factory = vienna_chain if rng.random() < 0.5 else canaries_chain
        chain = factory(rng.uniform(-1, 1), 1.5 + 500 * rng.random(), 1.5 + 500 * rng.random())
        table = joint_probabilities(state, ifm, chain)
        assert table.total == pytest.approx(1.0, abs=1e-12)
        assert np.all(table.as_array() >= 0)


def _oracle_det1_minus(phase: float, minus: np.ndarray) -> float:
    """P(Det1, minus) for the ideal state by state-vector arithmetic."""
    psi = np.zeros((2, 2), dtype=complex)  # [path, polarization]
    psi[0, 0] = psi[1, 1] = 1 / np.sqrt(2)
    system = psi @ minus.conj()
    det1 = (system[0] + 1j * np.exp(1j * phase) * system[1]) / np.sqrt(2)
    return float(abs(det1) ** 2)


def test_probabilities_agree_with_state_vector_oracle():
    rng = np.random.default_rng(8)
    for _ in range(100):
        drive = rng.uniform(-1, 1)
        phase = rng.uniform(0, 2 * np.pi)
        chain = PERFECT.at(drive)
        minus = chain.jones().conj().T @ np.array([0.0, 1.0])
        table = joint_probabilities(ideal_state(), InterferometerConfig(phase), chain)
        assert table[("Det1", "minus")] == pytest.approx(_oracle_det1_minus(phase, minus), abs=1e-9)


def test_conditioned_fringes_are_pi_shifted():
    phases = np.linspace(0, 2 * np.pi, 100)
    fringes = conditional_fringes(ideal_state(), PERFECT.at(1.0), phases)
    shifted = conditional_fringes(ideal_state(), PERFECT.at(1.0), phases + np.pi)
    assert fringes["minus"] == pytest.approx(shifted["plus"], abs=1e-9)
    assert fringes["minus"] == pytest.approx((1 + np.cos(phases)) / 2, abs=1e-9)
    flat = conditional_fringes(ideal_state(), PERFECT.at(0.0), phases)
    assert flat["minus"] == pytest.approx(np.full(100, 0.5), abs=1e-12)


def test_welcher_weg_parameter_and_visibility():
    assert welcher_weg_parameter(0.023, 0.978) == pytest.approx(0.955)
    assert welcher_weg_parameter(0.5, 0.5) == 0.0
    assert welcher_weg_parameter(1.0, 0.0) == 1.0
    with pytest.raises(DomainError):
        welcher_weg_parameter(0.2, 0.2)
    assert visibility_from_extrema(390, 10) == pytest.approx(0.95)
    assert visibility_from_extrema(100, 100) == 0.0
    with pytest.raises(DomainError):
        visibility_from_extrema(0, 0)


def test_complementarity_bound():
    published = ComplementarityFactors(0.97, 0.95)
    assert complementarity_bound(0.0, ComplementarityFactors(1.0, 1.0)) == 1.0
    assert complementarity_bound(0.97, published) == pytest.approx(0.0, abs=1e-12)
    assert complementarity_bound(0.5, published) == pytest.approx(0.8141, abs=1e-4)
    with pytest.raises(DomainError):
        complementarity_bound(0.98, published)
    curve = bound_curve(published, points=11)
    assert curve[0][1] == pytest.approx(0.95)
    assert curve[-1][0] == pytest.approx(0.97)


def test_correction_factors():
    factors = derive_correction_factors(0.98, 0.969, 180, 250)
    assert factors.eta_i == pytest.approx(0.9692, abs=1e-4)
    assert factors.eta_v == pytest.approx(0.9507, abs=1e-4)
    ideal = derive_correction_factors(1.0, 1.0, math.inf, math.inf)
    assert (ideal.eta_i, ideal.eta_v) == (1.0, 1.0)
    half = derive_correction_factors(0.5, 0.5, 180, 250)
    assert half.eta_i == pytest.approx(0.4945, abs=1e-4)
    assert half.eta_v == pytest.approx(0.4904, abs=1e-4)


def test_vienna_endpoints_reach_the_correction_factors():
    state = make_hybrid_state(0.98, 0.969)
    chain = ChainSpec("vienna", 180, 250)
    factors = derive_correction_factors(0.98, 0.969, 180, 250)
    welcher_weg = predicted_point(state, chain.at, 0.0)
    erasure = predicted_point(state, chain.at, 1.0)
    assert welcher_weg.i_value == pytest.approx(factors.eta_i, abs=1e-9)
    assert welcher_weg.v_value == pytest.approx(0.0, abs=1e-9)
    assert erasure.v_value == pytest.approx(factors.eta_v, abs=1e-9)
    assert abs(welcher_weg.i_value - 0.955) < 0.02
    assert abs(erasure.v_value - 0.951) < 0.02


@pytest.mark.parametrize("drive", np.linspace(0, 1, 8))
def test_ideal_analytic_sweep_saturates_complementarity(drive):
    point = predicted_point(ideal_state(), PERFECT.at, drive)
    assert point.i_value**2 + point.v_value**2 == pytest.approx(1.0, abs=1e-9)


def test_predicted_points_respect_the_bound():
    state = make_hybrid_state(0.98, 0.969)
    chain = ChainSpec("vienna", 180, 250)
    factors = derive_correction_factors(0.98, 0.969, 180, 250)
    for drive in np.linspace(0, 1, 15):
        point = predicted_point(state, chain.at, drive)
        assert point.v_value <= complementarity_bound(min(point.i_value, factors.eta_i), factors) + 1e-9


def test_pbs_extinction_monotonically_raises_i():
    state = make_hybrid_state(0.98, 0.969)
    values = [predicted_point(state, ChainSpec("vienna", r, 250).at, 0.0).i_value for r in (10, 50, 180, 1000)]
    assert values == sorted(values)
    assert values[-1] < 0.98


def test_calibrated_contrast_reaches_target_visibility():
    state = make_hybrid_state(0.943, 0.97)
    chain = ChainSpec("canaries", 180, 250)
    contrast = calibrate_contrast(state, chain.at, 1.0, 0.751)
    assert contrast == pytest.approx(0.789, abs=1e-3)
    assert predicted_visibility(state, chain.at, 1.0, contrast=contrast) == pytest.approx(0.751, abs=1e-9)
    with pytest.raises(DomainError):
        calibrate_contrast(state, chain.at, 1.0, 0.99)
