"""Executes configured runs: simulation, chunking and in-memory counting."""

import logging
from functools import lru_cache
from typing import Dict, List, Tuple

import numpy as np

from core.analysis.counting import CountTable, tally_coincidences
from core.errors import ConfigurationError
from core.experiment.config import ExperimentConfig
from core.instrument.schedule import InterferometerSchedule
from core.instrument.simulator import simulate_run
from core.quantum.state import HybridState, make_hybrid_state
from core.spacetime.scenarios import ScenarioGeometry, build_scenario
from core.timetag.coincidence import find_coincidences
from core.timetag.model import PS_PER_S, TimeTagStream, concatenate_streams

logger = logging.getLogger(__name__)

DEFAULT_MAX_CHUNK_S = 2.0


@lru_cache(maxsize=32)
def _geometry(reference: str) -> ScenarioGeometry:
    return build_scenario(reference)


@lru_cache(maxsize=32)
def _state(v_hv: float, v_coh: float) -> HybridState:
    return make_hybrid_state(v_hv, v_coh)


def nominal_offset_ps(config: ExperimentConfig) -> int:
    """Expected t_sys - t_env of a true pair in tagger time."""
    geometry = _geometry(config.scenario_reference())
    return int(round((geometry.propagation_delta + config.clocks.offset_difference) * PS_PER_S))


class ExperimentRunner:
    """Runs schedules in chunks of at most ``max_chunk_s`` seconds.

    Chunk ``i`` of a run uses the run key extended by ``i``, so counting and
    stream generation see the same events.
    """

    def __init__(self, max_chunk_s: float = DEFAULT_MAX_CHUNK_S):
        self.max_chunk_s = max_chunk_s

    def _chunks(self, schedule: InterferometerSchedule) -> List[Tuple[float, InterferometerSchedule]]:
        chunks, start = [], 0.0
        for chunk in schedule.split(self.max_chunk_s):
            chunks.append((start, chunk))
            start += chunk.duration
        return chunks

    def _simulate_chunk(
        self, config: ExperimentConfig, chunk: InterferometerSchedule, start: float, run_key: Tuple[int, ...]
    ) -> Tuple[TimeTagStream, TimeTagStream]:
        return simulate_run(
            scenario=_geometry(config.scenario_reference()),
            state=_state(config.state.v_hv, config.state.v_coh),
            schedule=chunk,
            chain=config.chain,
            source=config.source,
            qrng=config.qrng,
            eom=config.eom,
            channels=config.channels,
            seed=config.seed,
            clocks=config.clocks,
            run_key=run_key,
            start_s=start,
        )

    def simulate(
        self, config: ExperimentConfig, schedule: InterferometerSchedule, run_key: Tuple[int, ...] = ()
    ) -> Tuple[TimeTagStream, TimeTagStream]:
        """Full-length streams of one run."""
        system, environment = [], []
        for i, (start, chunk) in enumerate(self._chunks(schedule)):
            sys_stream, env_stream = self._simulate_chunk(config, chunk, start, run_key + (i,))
            system.append(sys_stream)
            environment.append(env_stream)
        return concatenate_streams(system), concatenate_streams(environment)

    def count(
        self, config: ExperimentConfig, schedule: InterferometerSchedule, run_key: Tuple[int, ...] = ()
    ) -> CountTable:
        """Coincidence table of one run, matched at the nominal offset."""
        n_steps = len(schedule.steps)
        labels: Dict[int, int] = {s.step: i for i, s in enumerate(schedule.steps)}
        if sorted(labels) != list(range(n_steps)):
            raise ConfigurationError("counted schedules need step labels 0..n-1", field="schedule.steps")
        offset = nominal_offset_ps(config)
        window = config.analysis.window_ps
        table = None
        for i, (start, chunk) in enumerate(self._chunks(schedule)):
            sys_stream, env_stream = self._simulate_chunk(config, chunk, start, run_key + (i,))
            matched = find_coincidences(sys_stream, env_stream, window, offset)
            dwell = np.zeros(n_steps)
            dwell[chunk.steps[0].step] = chunk.duration
            part = tally_coincidences(matched, n_steps, dwell=dwell, env_duration=chunk.duration)
            table = part if table is None else table.merge(part)
        logger.debug("run %s: %d coincidences over %d steps", run_key, table.total_coincidences, n_steps)
        return table


__all__ = ["DEFAULT_MAX_CHUNK_S", "ExperimentRunner", "nominal_offset_ps"]
