import math
from dataclasses import replace

import numpy as np
import pytest

from core.analysis.pipeline import analyze_scan
from core.analysis.protocol import (
    RunKind,
    blocking_probabilities,
    blocking_schedules,
    complementarity_sweep,
    points_frame,
)
from core.errors import ConfigurationError
from core.experiment.config import ExperimentConfig, SweepSettings
from core.quantum.complementarity import complementarity_bound, derive_correction_factors

from tests.conftest import CONFIG_DIR, load_config, shortened


@pytest.fixture(scope="module")
def vienna_scan(runner, vienna_config):
    config = shortened(vienna_config, dwell=10.0)
    schedule = config.scan_schedule()
    table = runner.count(config, schedule, (RunKind.SCAN,))
    return analyze_scan(table, [s.phase for s in schedule.steps])


@pytest.fixture(scope="module")
def vienna_blocking(runner, vienna_config):
    block_b, block_a = blocking_schedules(30.0)
    via_a = runner.count(vienna_config, block_b, (RunKind.BLOCK_PATH_B,))
    via_b = runner.count(vienna_config, block_a, (RunKind.BLOCK_PATH_A,))
    return via_a, via_b


def test_vienna_erasure_visibility(vienna_scan):
    v = vienna_scan.visibility
    assert abs(v.value - 0.951) <= max(0.02, 3 * v.sigma)


def test_vienna_fringes_are_pi_shifted(vienna_scan):
    shift = vienna_scan.phase_shift
    assert abs(shift.value - math.pi) <= 3 * shift.sigma + 1e-3


def test_vienna_welcher_weg_information(vienna_blocking):
    result = blocking_probabilities(*vienna_blocking, "V")
    assert result.p_a.value == pytest.approx(0.023, abs=0.01)
    assert result.p_b.value == pytest.approx(0.978, abs=0.01)
    assert result.i_value.value == pytest.approx(0.955, abs=0.02)


def test_vienna_erasure_setting_hides_the_path(vienna_blocking):
    result = blocking_probabilities(*vienna_blocking, "R")
    assert result.p_a.value == pytest.approx(0.52, abs=0.03)


def test_counting_is_reproducible(runner, vienna_config):
    schedule = replace(vienna_config, schedule=replace(vienna_config.schedule, steps=2, dwell=0.5)).scan_schedule()
    first = runner.count(vienna_config, schedule, (42,))
    second = runner.count(vienna_config, schedule, (42,))
    assert np.array_equal(first.coincidences, second.coincidences)
    assert np.array_equal(first.sys_singles, second.sys_singles)


def test_sweep_respects_the_complementarity_bound(runner, sweep_config):
    points = complementarity_sweep(sweep_config.sweep.fractions, runner, sweep_config)
    factors = derive_correction_factors(0.98, 0.969, 180, 250)
    for point in points:
        i_low = min(max(point.i_value.value - 3 * point.i_value.sigma, 0.0), factors.eta_i)
        assert point.v_value.value - 3 * point.v_value.sigma <= complementarity_bound(i_low, factors)
        assert point.latitude_deg == pytest.approx(90.0 * (1.0 - point.drive), abs=1e-6)
    assert points[0].i_value.value > 0.9 > points[-1].i_value.value
    assert points[-1].v_value.value > 0.9 > points[0].v_value.value
    frame = points_frame(points)
    assert list(frame.columns) == ["drive", "i", "sigma_i", "v", "sigma_v", "latitude_deg"]
    assert len(frame) == 8


def test_ideal_sweep_saturates_complementarity(runner):
    config = ExperimentConfig.from_dict(
        {
            "scenario": "vienna-II",
            "seed": 5,
            "chain": {"preset": "vienna", "pbs_extinction": math.inf, "eom_extinction": math.inf},
            "source": {"pulse_rate": 1e6, "pair_prob_per_pulse": 0.05},
            "eom": {"mode": "static"},
            "sweep": {"fractions": [0.0, 0.5, 1.0], "steps": 8, "dwell": 1.0, "blocking_dwell": 1.0},
        }
    )
    for point in complementarity_sweep(config.sweep.fractions, runner, config):
        i, v = point.i_value, point.v_value
        sigma = 2 * math.hypot(i.value * i.sigma, v.value * v.sigma)
        assert abs(i.value**2 + v.value**2 - 1.0) <= 3 * sigma + 2e-3


def test_shipped_configs_load():
    for path in sorted(CONFIG_DIR.glob("*.yaml")):
        config = load_config(path.stem)
        assert config.seed >= 0
        assert config.geometry().delays


def test_config_survives_its_manifest_form(vienna_config):
    assert ExperimentConfig.from_dict(vienna_config.to_dict()) == vienna_config


@pytest.mark.parametrize(
    "patch, field",
    [
        ({"state": {"v_hv": 0.9, "v_coh": 0.99}}, "state"),
        ({"eom": {"mode": "sometimes"}}, "eom.mode"),
        ({"source": {"pulse_rate": -1, "pair_prob_per_pulse": 0.1}}, "source.pulse_rate"),
        ({"sweep": {"fractions": [0.0, 1.5]}}, "sweep.fractions[1]"),
        ({"analysis": {"blocking_condition": "D"}}, "analysis.blocking_condition"),
    ],
)
def test_invalid_config_names_the_field(vienna_config, patch, field):
    with pytest.raises(ConfigurationError) as excinfo:
        ExperimentConfig.from_dict({**vienna_config.to_dict(), **patch})
    assert excinfo.value.field == field


def test_default_sweep_fractions():
    assert SweepSettings().fractions[0] == 0.0
    assert SweepSettings().fractions[-1] == pytest.approx(1.0)


@pytest.mark.slow
@pytest.mark.parametrize("name", ["canaries-II", "canaries-II-prime"])
def test_canaries_acceptance(runner, name):
    config = load_config(name)
    schedule = config.scan_schedule()
    table = runner.count(config, schedule, (RunKind.SCAN,))
    phases = [s.phase for s in schedule.steps]
    corrected = analyze_scan(table, phases, subtract=True)
    raw = analyze_scan(table, phases, subtract=False)
    assert 0.70 <= corrected.visibility.value <= 0.82
    assert raw.visibility.value < corrected.visibility.value
    assert raw.visibility.value < 0.6
    block_b, block_a = blocking_schedules(config.blocking.dwell, config.interferometer.contrast)
    via_a = runner.count(config, block_b, (RunKind.BLOCK_PATH_B,))
    via_b = runner.count(config, block_a, (RunKind.BLOCK_PATH_A,))
    i = blocking_probabilities(via_a, via_b, "V", subtract_background=True).i_value
    assert 0.90 <= i.value <= 0.95
