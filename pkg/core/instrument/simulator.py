"""Monte Carlo generation of both labs' raw tag streams.

One run covers an :class:`InterferometerSchedule`. Pairs are emitted per pump
pulse; only pulses that yield at least one detection are materialized, as
geometric gaps over the pulse train. Photon outcomes are drawn from the exact
joint probabilities with the EOM drive in force when the environment photon
reaches the projection lab.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Sequence, Tuple

import numpy as np

from core.errors import ConfigurationError
from core.instrument.config import ArmChannels, EomConfig, EomMode, QrngConfig, SourceConfig
from core.instrument.eom import EomStates, cycle_position, states_from_bits
from core.instrument.qrng import QrngSampler
from core.instrument.rng import Subsystem, subsystem_rng
from core.instrument.schedule import InterferometerSchedule
from core.quantum.interferometer import ProbabilityTable, joint_probabilities
from core.quantum.optics import ChainSpec
from core.quantum.state import HybridState
from core.spacetime.scenarios import REQUIRED_SEGMENTS, ScenarioGeometry
from core.timetag.clock import apply_clock
from core.timetag.model import ABSENT, Channel, ClockModel, Side, TimeTagStream

logger = logging.getLogger(__name__)

BOTH, SYSTEM_ONLY, ENVIRONMENT_ONLY = 0, 1, 2
# keys_in_order() lists three system outcomes per environment port
_SYS_OUTCOMES = 3


@dataclass(frozen=True)
class ClockPair:
    system: ClockModel = field(default_factory=ClockModel)
    environment: ClockModel = field(default_factory=ClockModel)

    @property
    def offset_difference(self) -> float:
        """System clock offset minus environment clock offset."""
        return self.system.offset_s - self.environment.offset_s

    def to_dict(self) -> Dict[str, object]:
        return {"system": self.system.to_dict(), "environment": self.environment.to_dict()}


def _check_scenario(scenario: ScenarioGeometry) -> None:
    for segment in REQUIRED_SEGMENTS:
        delay = scenario.delays.get(segment)
        if delay is None or not math.isfinite(delay):
            raise ConfigurationError("no delay for segment used by the simulation", field=f"segments.{segment}")


def emission_pulses(n_pulses: int, q: float, rng: np.random.Generator) -> np.ndarray:
    """Indices of the pulses (out of ``n_pulses``) that produce a detectable pair."""
    if n_pulses <= 0 or q <= 0.0:
        return np.zeros(0, dtype=np.int64)
    if q >= 1.0:
        return np.arange(n_pulses, dtype=np.int64)
    parts = []
    last = -1
    while True:
        remaining = n_pulses - 1 - last
        expected = remaining * q
        size = int(expected + 6.0 * math.sqrt(expected) + 16)
        idx = last + np.cumsum(rng.geometric(q, size))
        if idx[-1] >= n_pulses:
            parts.append(idx[idx < n_pulses])
            break
        parts.append(idx)
        last = int(idx[-1])
    return np.concatenate(parts).astype(np.int64)


def _draw(u: np.ndarray, probs: Sequence[float]) -> np.ndarray:
    cdf = np.cumsum(np.asarray(probs, dtype=float))
    cdf = cdf / cdf[-1]
    return np.minimum(np.searchsorted(cdf, u, side="right"), len(cdf) - 1)


def detection_categories(n: int, ts: float, te: float, rng: np.random.Generator) -> np.ndarray:
    """Which photons of a detected pair survive: both, system only or environment only."""
    detected = 1.0 - (1.0 - ts) * (1.0 - te)
    if n == 0 or detected <= 0.0:
        return np.zeros(n, dtype=np.int8)
    probs = [ts * te, ts * (1.0 - te), (1.0 - ts) * te]
    return _draw(rng.random(n), probs).astype(np.int8)


def dark_counts(
    rate: float, start: float, duration: float, channels: Tuple[Channel, ...], rng: np.random.Generator
) -> Tuple[np.ndarray, np.ndarray]:
    """Independent Poisson dark counts on each detector."""
    times, codes = [], []
    for channel in channels:
        n = int(rng.poisson(rate * duration)) if rate > 0 else 0
        times.append(start + duration * rng.random(n))
        codes.append(np.full(n, int(channel), dtype=np.int8))
    return np.concatenate(times), np.concatenate(codes)


def environment_eom_states(
    times: np.ndarray, qrng: QrngConfig, eom: EomConfig, seed: int, run_key: Tuple[int, ...] = ()
) -> EomStates:
    """EOM state at each lab-frame time; only the QRNG cycles touched are sampled."""
    times = np.asarray(times, dtype=float)
    if eom.mode is EomMode.STATIC:
        return states_from_bits(np.zeros(len(times)), np.zeros(len(times), dtype=np.int8), eom)
    cycles, since = cycle_position(times, qrng.latency, eom.bit_period)
    unique, inverse = np.unique(cycles, return_inverse=True)
    root = qrng.seed if qrng.seed is not None else seed
    sampler = QrngSampler(qrng.autocorrelation_time, eom.bit_period, subsystem_rng(root, Subsystem.QRNG, run_key))
    bits = sampler.sample(unique)[inverse]
    return states_from_bits(since, bits, eom)


def folded_jitter(n: int, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Detector response delay; never negative."""
    if sigma <= 0:
        return np.zeros(n)
    return np.abs(rng.normal(0.0, sigma, n))


def _stream(side: Side, clock: ClockModel, local_ps: np.ndarray, channels, eom_bits, qrng_bits, steps) -> TimeTagStream:
    order = np.argsort(local_ps, kind="stable")
    return TimeTagStream(
        side=side,
        clock=clock,
        times=local_ps[order],
        channels=np.asarray(channels)[order],
        eom_bits=np.asarray(eom_bits)[order],
        qrng_bits=np.asarray(qrng_bits)[order],
        scanner_steps=np.asarray(steps)[order],
    )


def simulate_run(
    scenario: ScenarioGeometry,
    state: HybridState,
    schedule: InterferometerSchedule,
    chain: ChainSpec,
    source: SourceConfig,
    qrng: QrngConfig,
    eom: EomConfig,
    channels: ArmChannels,
    seed: int,
    clocks: ClockPair = ClockPair(),
    run_key: Tuple[int, ...] = (),
    start_s: float = 0.0,
) -> Tuple[TimeTagStream, TimeTagStream]:
    """Simulate one run and return the (system-lab, environment-lab) streams.

    The schedule's first pump pulse fires at lab time ``start_s``. Identical
    arguments give identical streams.
    """
    _check_scenario(scenario)
    rng = {s: subsystem_rng(seed, s, run_key) for s in Subsystem if s is not Subsystem.QRNG}

    ts = source.arm_transmission_s * channels.system.transmission
    te = source.arm_transmission_e * channels.environment.transmission
    q = source.pair_prob_per_pulse * (1.0 - (1.0 - ts) * (1.0 - te))

    edges = start_s + schedule.boundaries
    emitted, positions = [], []
    for i, step in enumerate(schedule.steps):
        pulses = emission_pulses(int(round(step.dwell * source.pulse_rate)), q, rng[Subsystem.SOURCE])
        emitted.append(edges[i] + pulses / source.pulse_rate)
        positions.append(np.full(len(pulses), i, dtype=np.int64))
    t_em = np.concatenate(emitted)
    pos = np.concatenate(positions)
    n_events = len(t_em)

    category = detection_categories(n_events, ts, te, rng[Subsystem.LOSSES])
    has_env = category != SYSTEM_ONLY

    duration = schedule.duration
    env_dark_t, env_dark_ch = dark_counts(
        channels.environment.dark_rate, start_s + scenario.environment_delay, duration,
        (Channel.DET3, Channel.DET4), rng[Subsystem.DARKS],
    )
    sys_dark_t, sys_dark_ch = dark_counts(
        channels.system.dark_rate, start_s + scenario.system_delay, duration,
        (Channel.DET1, Channel.DET2), rng[Subsystem.DARKS],
    )

    env_photon_t = t_em[has_env] + scenario.environment_delay
    states = environment_eom_states(
        np.concatenate([env_photon_t, env_dark_t]), qrng, eom, seed, run_key
    )
    n_env_photons = len(env_photon_t)

    drive = np.zeros(n_events)
    drive[has_env] = states.drive[:n_env_photons]
    drive_values, drive_code = np.unique(drive, return_inverse=True)
    group = pos * len(drive_values) + drive_code

    sys_out = np.full(n_events, -1, dtype=np.int64)
    env_out = np.full(n_events, -1, dtype=np.int64)
    u = rng[Subsystem.OUTCOMES].random(n_events)
    tables: Dict[Tuple[int, float], ProbabilityTable] = {}

    order = np.argsort(group, kind="stable")
    sorted_groups = group[order]
    for g in np.unique(group):
        lo, hi = np.searchsorted(sorted_groups, [g, g + 1])
        idx = order[lo:hi]
        p_i, d_i = divmod(int(g), len(drive_values))
        key = (p_i, float(drive_values[d_i]))
        if key not in tables:
            tables[key] = joint_probabilities(state, schedule.interferometer(p_i), chain.at(key[1]))
        table = tables[key]
        cat = category[idx]

        both = idx[cat == BOTH]
        k = _draw(u[both], table.as_array())
        sys_out[both] = k % _SYS_OUTCOMES
        env_out[both] = k // _SYS_OUTCOMES

        sys_only = idx[cat == SYSTEM_ONLY]
        sys_out[sys_only] = _draw(
            u[sys_only], [table.system_marginal("Det1"), table.system_marginal("Det2"), table.no_click]
        )

        env_only = idx[cat == ENVIRONMENT_ONLY]
        env_out[env_only] = _draw(
            u[env_only], [table.environment_marginal("plus"), table.environment_marginal("minus")]
        )

    # system lab
    clicked = (sys_out == 0) | (sys_out == 1)
    step_labels = np.array([s.step for s in schedule.steps], dtype=np.int32)
    sys_t = np.concatenate([t_em[clicked] + scenario.system_delay, sys_dark_t])
    sys_ch = np.concatenate([(Channel.DET1 + sys_out[clicked]).astype(np.int8), sys_dark_ch])
    sys_steps = np.concatenate(
        [step_labels[pos[clicked]], step_labels[schedule.position_of(sys_dark_t - scenario.system_delay - start_s)]]
    )

    # environment lab; every env photon reaches a port
    env_ports = env_out[has_env]
    env_t = np.concatenate([env_photon_t, env_dark_t])
    env_ch = np.concatenate(
        [np.where(env_ports == 0, Channel.DET3, Channel.DET4).astype(np.int8), env_dark_ch]
    )

    sys_t = sys_t + folded_jitter(len(sys_t), channels.system.jitter_sigma, rng[Subsystem.JITTER])
    env_t = env_t + folded_jitter(len(env_t), channels.environment.jitter_sigma, rng[Subsystem.JITTER])
    sys_ps = apply_clock(sys_t, clocks.system, rng[Subsystem.CLOCK])
    env_ps = apply_clock(env_t, clocks.environment, rng[Subsystem.CLOCK])

    n_sys = len(sys_ps)
    system = _stream(
        Side.SYSTEM, clocks.system, sys_ps, sys_ch,
        np.full(n_sys, ABSENT, dtype=np.int8), np.full(n_sys, ABSENT, dtype=np.int8), sys_steps,
    )
    environment = _stream(
        Side.ENVIRONMENT, clocks.environment, env_ps, env_ch,
        states.eom_bits, states.qrng_bits, np.full(len(env_ps), ABSENT, dtype=np.int32),
    )
    logger.debug(
        "run %s: %d detected pairs, %d system tags, %d environment tags over %.3f s",
        run_key, n_events, len(system), len(environment), duration,
    )
    return system, environment


__all__ = [
    "ClockPair",
    "dark_counts",
    "detection_categories",
    "emission_pulses",
    "environment_eom_states",
    "folded_jitter",
    "simulate_run",
]
