import numpy as np
import pytest

from core.errors import ConfigurationError, DomainError, UnboundedSpeedError
from core.spacetime.events import (
    SPEED_OF_LIGHT,
    ExtendedEvent,
    IntervalClass,
    Relation,
    SpacetimeEvent,
    boost_event,
    boost_extended,
    classify_interval,
    min_required_signal_speed,
    relate_extended,
    required_signal_speed,
)
from core.spacetime.scenarios import (
    ScenarioConfig,
    Segment,
    build_scenario,
    list_scenarios,
    load_scenario_config,
)
from core.spacetime.verification import (
    RelationMatrix,
    choice_delay,
    choice_signal_speed,
    verify_scenario,
)

BUNDLED = [
    "vienna-I",
    "vienna-II",
    "vienna-III",
    "vienna-IV",
    "vienna-V",
    "vienna-VI",
    "canaries-II",
    "canaries-II'",
    "canaries-III",
]


def test_bundled_scenarios_are_listed():
    assert set(BUNDLED) <= set(list_scenarios())


@pytest.mark.parametrize("name", BUNDLED)
def test_bundled_relation_tables_reproduce(name):
    report = verify_scenario(build_scenario(name))
    assert len(report.checks) == 3
    assert report.passed, [(c.a, c.b, c.expected.value, c.actual.value) for c in report.failures]


def test_all_relation_checks_counted():
    checks = [check for name in BUNDLED for check in verify_scenario(build_scenario(name)).checks]
    assert len(checks) == 27
    assert all(check.passed for check in checks)


def test_canaries_prime_choice_speed():
    speed = choice_signal_speed(build_scenario("canaries-II'"))
    assert speed == pytest.approx(96.0, rel=0.05)


def test_canaries_delayed_choice_after_interference():
    delay = choice_delay(build_scenario("canaries-II"))
    assert delay == pytest.approx(449e-6, abs=5e-6)


def test_shifted_choice_breaks_locality():
    config = load_scenario_config("vienna-II")
    early = verify_scenario(build_scenario(config.with_choice_shift(300e-9)))
    assert [(c.a, c.b) for c in early.failures] == [("E_se", "C_e")]
    late = verify_scenario(build_scenario(config.with_choice_shift(400e-9)))
    assert ("I_s", "C_e") in [(c.a, c.b) for c in late.failures]


def test_explicit_expectation_mismatch_is_reported():
    geometry = build_scenario("vienna-II")
    expected = RelationMatrix.from_rows(
        [("P_e", "I_s", "spacelike"), ("I_s", "C_e", "before"), ("E_se", "C_e", "spacelike")]
    )
    report = verify_scenario(geometry, expected)
    assert not report.passed
    assert report.failures[0].actual is Relation.SPACELIKE
    assert set(report.to_frame()["status"]) == {"PASS", "FAIL"}


def test_unknown_scenario():
    with pytest.raises(ConfigurationError, match="vienna-II"):
        build_scenario("mars-I")


def test_interval_classes():
    origin = SpacetimeEvent.at("o", 0.0, 0.0)
    assert classify_interval(origin, SpacetimeEvent.at("x", 10.0, 1e-9)) is IntervalClass.SPACELIKE
    assert classify_interval(origin, SpacetimeEvent.at("x", 1.0, 1e-6)) is IntervalClass.TIMELIKE_BEFORE
    assert classify_interval(origin, SpacetimeEvent.at("x", 1.0, -1e-6)) is IntervalClass.TIMELIKE_AFTER
    light = SpacetimeEvent.at("x", SPEED_OF_LIGHT * 1e-6, 1e-6)
    assert classify_interval(origin, light) is IntervalClass.LIGHTLIKE


def test_extended_events_with_mixed_ordering():
    long_event = ExtendedEvent.duration("a", 0.0, -1e-6, 1e-6, samples=5)
    point = ExtendedEvent.point("b", 1.0, 0.0)
    assert relate_extended(long_event, point) is Relation.MIXED
    assert relate_extended(ExtendedEvent.point("c", 0.0, -1e-6), point) is Relation.BEFORE
    assert Relation.BEFORE.inverse() is Relation.AFTER


def test_required_signal_speed():
    source = SpacetimeEvent.at("s", 0.0, 0.0)
    assert required_signal_speed(source, SpacetimeEvent.at("t", 2 * SPEED_OF_LIGHT, 1.0)) == pytest.approx(2.0)
    with pytest.raises(UnboundedSpeedError):
        required_signal_speed(source, SpacetimeEvent.at("t", 1.0, 0.0))
    with pytest.raises(DomainError):
        required_signal_speed(source, SpacetimeEvent.at("t", 0.0, 0.0))


def test_relations_survive_lorentz_boosts():
    rng = np.random.default_rng(3)
    for _ in range(1000):
        a = ExtendedEvent.point("a", rng.uniform(-1e3, 1e3), rng.uniform(-5e-6, 5e-6))
        b = ExtendedEvent.point("b", rng.uniform(-1e3, 1e3), rng.uniform(-5e-6, 5e-6))
        relation = relate_extended(a, b)
        beta = rng.uniform(-0.9, 0.9)
        boosted = relate_extended(boost_extended(a, beta), boost_extended(b, beta))
        assert boosted is relation
        assert (relation is Relation.SPACELIKE) == (relate_extended(b, a) is Relation.SPACELIKE)


def test_superluminal_speed_means_spacelike():
    rng = np.random.default_rng(4)
    for _ in range(1000):
        first = SpacetimeEvent.at("a", rng.uniform(-1e3, 1e3), rng.uniform(-5e-6, 0.0))
        later = SpacetimeEvent.at("b", rng.uniform(-1e3, 1e3), rng.uniform(1e-9, 5e-6))
        interval = classify_interval(first, later)
        if interval is IntervalClass.LIGHTLIKE:
            continue
        assert (required_signal_speed(first, later) > 1.0) == (interval is IntervalClass.SPACELIKE)


def test_least_demanding_speed_over_extended_events():
    source = ExtendedEvent.point("s", 0.0, 0.0)
    target = ExtendedEvent.duration("t", 2 * SPEED_OF_LIGHT, 1.0, 2.0, samples=2)
    assert min_required_signal_speed(source, target) == pytest.approx(1.0)
    with pytest.raises(UnboundedSpeedError):
        min_required_signal_speed(target, source)


def test_boost_preserves_the_interval():
    event = SpacetimeEvent.at("e", 150.0, 2e-6)
    boosted = boost_event(event, 0.6)
    interval = (SPEED_OF_LIGHT * event.time) ** 2 - event.position[0] ** 2
    boosted_interval = (SPEED_OF_LIGHT * boosted.time) ** 2 - boosted.position[0] ** 2
    assert boosted_interval == pytest.approx(interval, rel=1e-9)
    with pytest.raises(DomainError):
        boost_event(event, 1.0)


def test_segment_needs_a_known_medium():
    data = load_scenario_config("vienna-II").to_dict()
    data["segments"]["env_link"]["medium"] = "glass"
    with pytest.raises(ConfigurationError) as excinfo:
        ScenarioConfig.from_dict(data)
    assert excinfo.value.field == "segments.env_link.medium"
    with pytest.raises(ConfigurationError):
        Segment(length_m=3.0)
    assert Segment(delay_s=1e-9).delay() == 1e-9
