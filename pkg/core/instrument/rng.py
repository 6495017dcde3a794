"""Deterministic per-subsystem random streams derived from one root seed.

Every generator comes from ``SeedSequence(root, spawn_key=(*run_key,
subsystem))``, so a subsystem's draws depend only on the root seed, the run
key and its own identifier. Switching one subsystem off leaves the others'
draws untouched.
"""

from enum import IntEnum
from typing import Tuple

import numpy as np


class Subsystem(IntEnum):
    SOURCE = 0
    QRNG = 1
    LOSSES = 2
    DARKS = 3
    JITTER = 4
    CLOCK = 5
    OUTCOMES = 6


def subsystem_rng(seed: int, subsystem: Subsystem, run_key: Tuple[int, ...] = ()) -> np.random.Generator:
    sequence = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in run_key) + (int(subsystem),))
    return np.random.default_rng(sequence)


__all__ = ["Subsystem", "subsystem_rng"]
