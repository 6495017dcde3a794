"""Physical random bit source with a finite autocorrelation time.

Bits form a symmetric two-state Markov chain on the sampling grid: the
probability that bit ``k + d`` equals bit ``k`` is ``(1 + rho**d) / 2`` with
``rho = exp(-cadence / tau)``, so the lag-``d`` autocorrelation is
``rho**d`` and the marginal stays balanced.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from core.errors import DomainError
from core.instrument.config import QrngConfig
from core.instrument.rng import Subsystem, subsystem_rng

DEFAULT_CADENCE_S = 500e-9


@dataclass(frozen=True, eq=False)
class BitSequence:
    """Bits generated at ``start_s + k * cadence_s``.

    Bit ``k`` reaches the EOM driver ``latency_s`` after it is generated.
    """

    start_s: float
    cadence_s: float
    bits: np.ndarray
    latency_s: float = 0.0

    def __post_init__(self) -> None:
        bits = np.asarray(self.bits, dtype=np.int8)
        if self.cadence_s <= 0:
            raise DomainError("bit cadence must be positive")
        if bits.size and not np.all((bits == 0) | (bits == 1)):
            raise DomainError("bits must be 0 or 1")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    def __len__(self) -> int:
        return len(self.bits)

    @property
    def times(self) -> np.ndarray:
        return self.start_s + self.cadence_s * np.arange(len(self.bits))

    @property
    def trigger_start(self) -> float:
        return self.start_s + self.latency_s

    @property
    def trigger_end(self) -> float:
        return self.trigger_start + self.cadence_s * len(self.bits)

    def mean(self) -> float:
        return float(self.bits.mean()) if len(self.bits) else float("nan")

    def autocorrelation(self, lag: int) -> float:
        """Pearson correlation between bits ``lag`` samples apart."""
        if lag <= 0 or lag >= len(self.bits):
            raise DomainError(f"lag must lie in [1, {len(self.bits) - 1}]")
        x = self.bits.astype(float)
        return float(np.corrcoef(x[:-lag], x[lag:])[0, 1])


class QrngSampler:
    """Draws chain values at arbitrary sorted grid indices.

    Sampling only the queried indices gives the same joint distribution as
    generating the whole grid and reading those entries.
    """

    def __init__(self, autocorrelation_time: float, cadence: float, rng: np.random.Generator):
        if cadence <= 0:
            raise DomainError("bit cadence must be positive")
        self.cadence = cadence
        self.rho = math.exp(-cadence / autocorrelation_time) if autocorrelation_time > 0 else 0.0
        self._rng = rng

    def sample(self, indices: np.ndarray) -> np.ndarray:
        indices = np.asarray(indices, dtype=np.int64)
        n = len(indices)
        if n == 0:
            return np.zeros(0, dtype=np.int8)
        if n > 1 and np.any(np.diff(indices) <= 0):
            raise DomainError("QRNG indices must be strictly increasing")
        first = self._rng.integers(0, 2)
        u = self._rng.random(n - 1)
        gaps = np.diff(indices).astype(float)
        flip_prob = 0.5 * (1.0 - np.power(self.rho, gaps))
        flips = np.concatenate(([first], (u < flip_prob).astype(np.int64)))
        return (np.cumsum(flips) % 2).astype(np.int8)


def qrng_stream(
    cfg: QrngConfig,
    duration: float,
    cadence: float = DEFAULT_CADENCE_S,
    seed: Optional[int] = None,
    run_key: tuple = (),
) -> BitSequence:
    """Bits covering ``duration`` seconds at the given cadence.

    ``cfg.seed`` takes precedence over ``seed``; one of them must be set.
    """
    if not duration > 0:
        raise DomainError("duration must be positive")
    root = cfg.seed if cfg.seed is not None else seed
    if root is None:
        raise DomainError("a QRNG stream needs a seed")
    n = int(math.ceil(duration / cadence))
    sampler = QrngSampler(cfg.autocorrelation_time, cadence, subsystem_rng(root, Subsystem.QRNG, run_key))
    return BitSequence(0.0, cadence, sampler.sample(np.arange(n)), cfg.latency)


__all__ = ["BitSequence", "DEFAULT_CADENCE_S", "QrngSampler", "qrng_stream"]
