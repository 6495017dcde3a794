import numpy as np
import pytest

from core.errors import DataError, DomainError, NoCorrelationError, TagFileError
from core.timetag.clock import apply_clock, gps_walk
from core.timetag.coincidence import (
    accidental_rate,
    estimate_clock_offset,
    find_coincidences,
    offset_window_accidentals,
)
from core.timetag.io import read_stream, write_coincidences, write_stream
from core.timetag.model import (
    ABSENT,
    Channel,
    ClockDiscipline,
    ClockModel,
    Side,
    TimeTag,
    TimeTagStream,
    concatenate_streams,
)


def make_stream(side: Side, times, channel: Channel = None, clock: ClockModel = None) -> TimeTagStream:
    times = np.asarray(times, dtype=np.int64)
    if channel is None:
        channel = Channel.DET1 if side is Side.SYSTEM else Channel.DET3
    n = len(times)
    return TimeTagStream(
        side=side,
        clock=clock or ClockModel(),
        times=times,
        channels=np.full(n, int(channel)),
        eom_bits=np.full(n, ABSENT),
        qrng_bits=np.full(n, ABSENT),
        scanner_steps=np.full(n, ABSENT),
    )


def poisson_times(rng: np.random.Generator, rate: float, duration_s: float) -> np.ndarray:
    n = rng.poisson(rate * duration_s)
    return np.unique(rng.integers(0, int(duration_s * 1e12), n))


def test_stream_file_round_trip(tmp_path):
    clock = ClockModel(offset_s=2.5e-6, discipline=ClockDiscipline.GPS, walk_sigma=5e-11)
    stream = TimeTagStream.from_tags(
        Side.ENVIRONMENT,
        clock,
        [
            TimeTag(10, Channel.DET3, eom_bit=0, qrng_bit=0),
            TimeTag(10, Channel.DET4, eom_bit=None, qrng_bit=1),
            TimeTag(2_000_000_000_000, Channel.DET4, eom_bit=1, qrng_bit=1),
        ],
    )
    path = write_stream(stream, tmp_path / "env.tags")
    loaded = read_stream(path)
    assert loaded.same_as(stream)
    assert loaded.tag(1).eom_bit is None
    assert loaded.clock.discipline is ClockDiscipline.GPS


@pytest.mark.parametrize(
    "records, line",
    [
        (["100,Det1,-,-,0", "50,Det2,-,-,0"], 4),
        (["100,Det3,-,-,0"], 3),
        (["100,Det1,-,-,0", "x100,Det1,-,-,0"], 4),
        (["100,Det1,2a,-,0"], 3),
    ],
)
def test_malformed_records_report_their_line(tmp_path, records, line):
    path = tmp_path / "bad.tags"
    path.write_text("side=system\ntime_ps,channel,eom_bit,qrng_bit,scanner_step\n" + "\n".join(records) + "\n")
    with pytest.raises(TagFileError) as excinfo:
        read_stream(path)
    assert excinfo.value.line == line


def test_header_errors(tmp_path):
    path = tmp_path / "bad.tags"
    path.write_text("side=moon\ntime_ps,channel,eom_bit,qrng_bit,scanner_step\n")
    with pytest.raises(TagFileError):
        read_stream(path)
    path.write_text("side=system\n")
    with pytest.raises(TagFileError, match="column header"):
        read_stream(path)


def test_stream_invariants():
    with pytest.raises(DataError):
        make_stream(Side.SYSTEM, [5, 3])
    with pytest.raises(DataError):
        make_stream(Side.SYSTEM, [1, 2], channel=Channel.DET4)
    merged = concatenate_streams([make_stream(Side.SYSTEM, [1, 9]), make_stream(Side.SYSTEM, [4])])
    assert merged.times.tolist() == [1, 4, 9]


def test_single_pair_inside_window():
    a = make_stream(Side.SYSTEM, [100_000])
    b = make_stream(Side.ENVIRONMENT, [100_400])
    matched = find_coincidences(a, b, window_ps=1000)
    assert len(matched) == 1
    assert matched.dt_ps.tolist() == [-400]
    assert len(find_coincidences(a, b, window_ps=700)) == 0
    with pytest.raises(DomainError):
        find_coincidences(a, b, window_ps=0)


def test_each_tag_used_once_and_smallest_residual_wins():
    a = make_stream(Side.SYSTEM, [1000, 1300])
    b = make_stream(Side.ENVIRONMENT, [1100])
    matched = find_coincidences(a, b, window_ps=1000)
    assert matched.pairs() == {(0, 0)}
    tie = find_coincidences(make_stream(Side.SYSTEM, [1000, 1200]), b, window_ps=1000)
    assert tie.pairs() == {(0, 0)}


def test_matching_is_symmetric_under_swapping_streams():
    rng = np.random.default_rng(21)
    a = make_stream(Side.SYSTEM, poisson_times(rng, 2e6, 1e-3))
    b = make_stream(Side.ENVIRONMENT, poisson_times(rng, 2e6, 1e-3))
    forward = find_coincidences(a, b, window_ps=400_000, offset_ps=30_000)
    backward = find_coincidences(b, a, window_ps=400_000, offset_ps=-30_000)
    assert len(forward) > 100
    assert forward.pairs() == {(j, i) for i, j in backward.pairs()}


def test_wider_windows_only_add_pairs():
    rng = np.random.default_rng(22)
    a = make_stream(Side.SYSTEM, poisson_times(rng, 1e6, 2e-3))
    b = make_stream(Side.ENVIRONMENT, poisson_times(rng, 1e6, 2e-3))
    previous = set()
    for window in (10_000, 100_000, 500_000, 2_000_000):
        pairs = find_coincidences(a, b, window).pairs()
        assert previous <= pairs
        previous = pairs


def test_accidentals_between_independent_streams():
    expected = accidental_rate(50e3, 50e3, 1e-9) * 10.0
    assert expected == pytest.approx(25.0)
    counts = []
    for seed in range(50):
        rng = np.random.default_rng(2012 + seed)
        a = make_stream(Side.SYSTEM, poisson_times(rng, 50e3, 10.0))
        b = make_stream(Side.ENVIRONMENT, poisson_times(rng, 50e3, 10.0))
        counts.append(len(find_coincidences(a, b, 1000)))
    total = 50 * expected
    assert abs(sum(counts) - total) <= 3 * np.sqrt(total)
    outliers = [n for n in counts if abs(n - expected) > 3 * np.sqrt(expected)]
    assert len(outliers) <= 2


def _correlated_pair(offset_ps: int, seed: int = 4):
    rng = np.random.default_rng(seed)
    base = poisson_times(rng, 20e3, 1.0) + 10_000_000
    jitter = np.abs(rng.normal(0, 30, len(base))).astype(np.int64)
    system = make_stream(Side.SYSTEM, np.sort(base + offset_ps + jitter))
    environment = make_stream(Side.ENVIRONMENT, base)
    return system, environment


def test_offset_recovered_from_correlated_streams():
    system, environment = _correlated_pair(350_000)
    estimate = estimate_clock_offset(system, environment, search_span_ps=1_000_000, bin_ps=100)
    assert estimate.offset_ps == pytest.approx(350_000, abs=100)
    assert estimate.significance > 5
    limited = estimate_clock_offset(
        system, environment, search_span_ps=200_000, bin_ps=100, center_ps=300_000, max_tags=5_000
    )
    assert limited.offset_ps == pytest.approx(350_000, abs=100)


def test_uncorrelated_streams_have_no_offset():
    rng = np.random.default_rng(9)
    a = make_stream(Side.SYSTEM, poisson_times(rng, 20e3, 1.0))
    b = make_stream(Side.ENVIRONMENT, poisson_times(rng, 20e3, 1.0))
    with pytest.raises(NoCorrelationError):
        estimate_clock_offset(a, b, search_span_ps=1_000_000, bin_ps=1000)


def test_displaced_window_sees_only_accidentals():
    system, environment = _correlated_pair(0)
    assert len(find_coincidences(system, environment, 1000)) > 19_000
    assert offset_window_accidentals(system, environment, 1000, 0, 50_000) < 5
    with pytest.raises(DomainError):
        offset_window_accidentals(system, environment, 1000, 0, 500)


def test_coincidence_table_export(tmp_path):
    a = make_stream(Side.SYSTEM, [100_000])
    b = make_stream(Side.ENVIRONMENT, [100_400])
    path = write_coincidences(find_coincidences(a, b, 1000), tmp_path / "pairs.csv")
    assert path.read_text().splitlines()[1].startswith("100000,100400,-400,Det1,Det3")


def test_shared_generator_clock_is_a_fixed_offset():
    clock = ClockModel(offset_s=1e-6)
    ps = apply_clock(np.array([0.0, 0.5]), clock, np.random.default_rng(0))
    assert ps.tolist() == [1_000_000, 500_001_000_000]
    with pytest.raises(DomainError):
        ClockModel(drift=1e-9)


def test_gps_walk_restarts_at_sync_marks():
    rng = np.random.default_rng(1)
    seconds = np.arange(2000, dtype=float)
    times = np.sort(np.concatenate([seconds, seconds + 0.81]))
    walk = gps_walk(times, 50e-12, rng)
    at_marks = walk[np.isin(times, seconds)]
    assert np.all(at_marks == 0.0)
    spread = walk[~np.isin(times, seconds)].std()
    assert spread == pytest.approx(50e-12 * 0.9, rel=0.1)
