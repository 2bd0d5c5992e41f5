"""Counter-split random streams.

Every Monte Carlo trial draws from its own generator, derived from the
master seed and a tuple of counters (instance number, trial number,
stream number).  Streams never overlap, and a trial's draws do not
depend on how many other trials ran before it or on which thread ran it.
"""

from __future__ import annotations

import numpy as np


def trial_rng(seed: int, *key: int) -> np.random.Generator:
    """Return the generator for counter ``key`` under master ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key)))


# Stream numbers used as the last counter of a trial key.
QUANTUM_STREAM = 0
SE_STREAM = 1
NAIVE_STREAM = 2
