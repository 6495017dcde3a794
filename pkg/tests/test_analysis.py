import math

import numpy as np
import pytest

from core.analysis.counting import (
    CountTable,
    Estimate,
    conditional_probabilities,
    minus_port_condition,
    probabilities_from_counts,
    resolve_condition,
    tally_coincidences,
)
from core.analysis.fringe import (
    FringeFit,
    FringeScan,
    average_visibility,
    fit_fringe,
    fringe_scan,
    phase_difference,
    subtract_background,
)
from core.analysis.pipeline import analyze_scan, match_run
from core.analysis.protocol import (
    RunKind,
    blocking_probabilities,
    blocking_schedules,
    path_probabilities_via_blocking,
)
from core.errors import DomainError, InsufficientDataError
from core.quantum.complementarity import visibility_from_extrema
from core.quantum.interferometer import Blocked
from core.timetag.coincidence import find_coincidences
from core.timetag.model import ABSENT, Channel, ClockModel, Side, TimeTagStream

PHASES = np.arange(24) * math.pi / 12


def single_series(counts, phases=PHASES, variances=None, dwell=1.0) -> FringeScan:
    counts = np.asarray(counts, dtype=float)
    variances = counts.copy() if variances is None else np.asarray(variances, dtype=float)
    return FringeScan(
        np.arange(len(phases)),
        np.asarray(phases, dtype=float),
        {("Det1", "R"): counts},
        {("Det1", "R"): variances},
        np.full(len(phases), dwell),
    )


def table_with(conditioned: dict, n_steps: int = 1, sys_singles=None, env_singles=None) -> CountTable:
    """CountTable from {condition: array [step, det]} counts."""
    coincidences = np.zeros((n_steps, 2, 2, 2))
    for name, counts in conditioned.items():
        cond = resolve_condition(name)
        coincidences[:, :, cond.env_index, cond.eom_bit] = np.asarray(counts).reshape(n_steps, 2)
    return CountTable(
        coincidences,
        np.zeros((n_steps, 2)) if sys_singles is None else np.asarray(sys_singles, dtype=float),
        np.zeros((2, 2)) if env_singles is None else np.asarray(env_singles, dtype=float),
        float(n_steps),
        np.ones(n_steps),
        1000,
    )


def test_fit_recovers_a_noisy_fringe():
    rng = np.random.default_rng(31)
    counts = rng.poisson(200 * (1 + 0.95 * np.cos(PHASES - 0.3)))
    fit = fit_fringe(single_series(counts), "Det1", "R")
    assert abs(fit.visibility.value - 0.95) <= 3 * fit.visibility.sigma
    assert abs(fit.phase0 - 0.3) <= 3 * fit.phase0_sigma
    assert 0 < fit.visibility.sigma < 0.03
    assert fit.n_points == 24


def test_fitted_visibility_matches_the_fitted_extrema():
    counts = np.random.default_rng(33).poisson(300 * (1 + 0.7 * np.cos(PHASES + 1.1)))
    fit = fit_fringe(single_series(counts), "Det1", "R")
    extrema = visibility_from_extrema(fit.offset + abs(fit.amplitude), fit.offset - abs(fit.amplitude))
    assert abs(extrema - fit.visibility.value) <= 1e-12


def test_visibility_error_shrinks_with_dwell():
    ratios = []
    for seed in range(20):
        rng = np.random.default_rng(400 + seed)
        short = rng.poisson(100 * (1 + 0.8 * np.cos(PHASES)))
        long = rng.poisson(400 * (1 + 0.8 * np.cos(PHASES)))
        sigma_short = fit_fringe(single_series(short, dwell=1.0), "Det1", "R").visibility.sigma
        sigma_long = fit_fringe(single_series(long, dwell=4.0), "Det1", "R").visibility.sigma
        ratios.append(sigma_long / sigma_short)
    assert np.mean(ratios) == pytest.approx(0.5, rel=0.2)


def test_flat_counts_give_small_visibility():
    counts = np.random.default_rng(32).poisson(200, len(PHASES))
    fit = fit_fringe(single_series(counts), "Det1", "R")
    assert fit.visibility.value < 0.08


def test_background_subtraction_restores_the_signal_visibility():
    signal = 100 * (1 + 0.9 * np.cos(PHASES))
    scan = single_series(signal + 50)
    raw = fit_fringe(scan, "Det1", "R")
    assert raw.visibility.value == pytest.approx(0.6, abs=1e-6)
    cleaned = subtract_background(scan, 50.0)
    assert cleaned.background_subtracted
    assert fit_fringe(cleaned, "Det1", "R").visibility.value == pytest.approx(0.9, abs=1e-6)
    assert np.all(cleaned.variances[("Det1", "R")] == scan.variances[("Det1", "R")] + 50)
    clamped = subtract_background(scan, {("Det1", "R"): 1e6})
    assert np.all(clamped.counts[("Det1", "R")] == 0)


def test_fit_needs_enough_points_over_a_period():
    with pytest.raises(InsufficientDataError):
        fit_fringe(single_series(np.full(5, 100.0), np.arange(5) * 2 * math.pi / 5), "Det1", "R")
    with pytest.raises(InsufficientDataError):
        fit_fringe(single_series(np.full(6, 100.0), np.linspace(0, math.pi / 2, 6)), "Det1", "R")


def test_blocking_probabilities_and_their_uncertainty():
    via_a = table_with({"V": [[10, 20]]})
    via_b = table_with({"V": [[500, 470]]})
    result = blocking_probabilities(via_a, via_b, "V")
    assert result.p_a.value == pytest.approx(0.03)
    assert result.p_b.value == pytest.approx(0.97)
    assert result.p_a.sigma == pytest.approx(math.sqrt(0.03 * 0.97 / 1000))
    assert result.i_value.value == pytest.approx(0.94)
    assert result.i_value.sigma == pytest.approx(2 * result.p_a.sigma)
    with pytest.raises(InsufficientDataError):
        blocking_probabilities(via_a, via_b, "R")


def test_blocking_with_accidental_subtraction():
    singles = [[1e5, 1e5]]
    env = [[0.0, 0.0], [1e5, 0.0]]
    via_a = table_with({"V": [[15, 15]]}, sys_singles=singles, env_singles=env)
    via_b = table_with({"V": [[485, 485]]}, sys_singles=singles, env_singles=env)
    assert via_a.conditioned_accidentals("V").sum() == pytest.approx(20.0)
    result = blocking_probabilities(via_a, via_b, "V", subtract_background=True)
    assert result.counts_a == pytest.approx(10.0)
    assert result.p_a.value == pytest.approx(10 / 960)
    assert result.background_subtracted


def test_condition_names():
    assert resolve_condition("+").name == "L"
    assert resolve_condition("-").name == "R"
    assert minus_port_condition(0).name == "V"
    assert minus_port_condition(1).name == "R"
    with pytest.raises(DomainError):
        resolve_condition("Q")
    with pytest.raises(InsufficientDataError):
        probabilities_from_counts(0, 0)


def _stream(side, times, channels, eom_bits=None, steps=None) -> TimeTagStream:
    n = len(times)
    return TimeTagStream(
        side=side,
        clock=ClockModel(),
        times=np.asarray(times, dtype=np.int64),
        channels=np.asarray([int(c) for c in channels]),
        eom_bits=np.full(n, ABSENT) if eom_bits is None else np.asarray(eom_bits),
        qrng_bits=np.full(n, ABSENT),
        scanner_steps=np.full(n, ABSENT) if steps is None else np.asarray(steps),
    )


def _tiny_run():
    system = _stream(
        Side.SYSTEM, [1000, 5000, 9000, 13000], [Channel.DET1, Channel.DET2, Channel.DET1, Channel.DET1], steps=[0, 0, 1, 1]
    )
    environment = _stream(
        Side.ENVIRONMENT,
        [1100, 5100, 9100, 13100],
        [Channel.DET4, Channel.DET4, Channel.DET4, Channel.DET3],
        eom_bits=[1, 1, 1, ABSENT],
    )
    return system, environment


def test_conditional_probabilities_from_pairs():
    system, environment = _tiny_run()
    matched = find_coincidences(system, environment, 1000, offset_ps=-100)
    assert len(matched) == 4
    probabilities = conditional_probabilities(matched, "R")
    assert probabilities["Det1"].value + probabilities["Det2"].value == pytest.approx(1.0)
    assert probabilities["Det1"].value == pytest.approx(2 / 3)
    assert probabilities["Det1"].sigma == pytest.approx(math.sqrt(2 / 27))


def test_tally_layout_and_invalid_eom_tags():
    system, environment = _tiny_run()
    table = tally_coincidences(find_coincidences(system, environment, 1000, -100), n_steps=2, dwell=[1.0, 1.0])
    assert table.conditioned("R").tolist() == [[1, 1], [1, 0]]
    assert table.total_coincidences == 3
    assert table.sys_singles.tolist() == [[1, 1], [2, 0]]
    assert table.env_singles[1, 1] == 3
    scan = fringe_scan(table, [0.0, math.pi], ["R"])
    assert list(scan.to_frame().columns) == ["step", "phase_rad", "dwell_s", "Det1|R", "Det2|R"]


def test_match_run_with_known_offset():
    system, environment = _tiny_run()
    run = match_run(system, environment, window_ps=1000, n_steps=2, dwell=[1.0, 1.0], offset_ps=-100)
    assert run.offset is None
    assert run.summary()["coincidences"] == 4


def _fit(value: float, sigma: float, phase0: float) -> FringeFit:
    return FringeFit("Det1", "R", 100.0, 100.0 * value, phase0, np.eye(3), 1.0, Estimate(value, sigma), value, 12)


def test_average_visibility_and_phase_difference():
    mean = average_visibility([_fit(0.9, 0.01, 0.1), _fit(0.8, 0.02, -3.0)])
    assert mean.value == pytest.approx(0.88)
    assert mean.sigma == pytest.approx(1 / math.sqrt(12500))
    delta = phase_difference(_fit(0.9, 0.01, 0.1), _fit(0.8, 0.02, -3.0))
    assert delta.value == pytest.approx(2 * math.pi - 3.1)
    assert delta.sigma == pytest.approx(math.sqrt(2))
    with pytest.raises(InsufficientDataError):
        average_visibility([])


def test_scan_analysis_on_complementary_fringes():
    phases = np.arange(12) * math.pi / 3
    bright = 100 * (1 + 0.9 * np.cos(phases))
    dark = 100 * (1 - 0.9 * np.cos(phases))
    table = table_with(
        {"R": np.column_stack([bright, dark]), "L": np.column_stack([dark, bright])}, n_steps=12
    )
    analysis = analyze_scan(table, phases)
    assert analysis.visibility.value == pytest.approx(0.9, abs=1e-6)
    assert analysis.phase_shift.value == pytest.approx(math.pi, abs=1e-6)
    assert set(analysis.skipped) == {"Det1|V", "Det2|V", "Det1|H", "Det2|H"}
    assert analysis.fit("Det2", "L").visibility.value == pytest.approx(0.9, abs=1e-6)


def test_blocking_schedules_block_each_path():
    via_a, via_b = blocking_schedules(5.0)
    assert via_a.blocked is Blocked.PATH_B
    assert via_b.blocked is Blocked.PATH_A
    assert via_a.duration == 5.0


class _BlockingRunner:
    """Returns canned tables keyed by which path the schedule blocks."""

    def __init__(self, tables):
        self.tables = tables
        self.calls = []

    def count(self, config, schedule, run_key):
        self.calls.append((schedule.blocked, run_key))
        return self.tables[schedule.blocked]


def test_path_probabilities_run_both_blocking_configurations(vienna_config):
    runner = _BlockingRunner(
        {Blocked.PATH_B: table_with({"V": [[10, 20]]}), Blocked.PATH_A: table_with({"V": [[500, 470]]})}
    )
    result = path_probabilities_via_blocking(runner, vienna_config, "V", dwell=1.0, subtract_background=False)
    assert result.p_a.value == pytest.approx(0.03)
    assert result.i_value.value == pytest.approx(0.94)
    assert runner.calls == [(Blocked.PATH_B, (RunKind.BLOCK_PATH_B,)), (Blocked.PATH_A, (RunKind.BLOCK_PATH_A,))]
