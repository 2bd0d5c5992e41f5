"""Classical fixed-confidence baselines.

Both algorithms draw Bernoulli rewards from the true biases with the
generator they are handed; they are the only code that samples arm
pulls.  Successive elimination draws whole blocks of rounds at once and
replays them round by round, discarding the unused tail of a block when
the active set changes.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .errors import ParameterError
from .oracle import BanditInstance

LOGGER = logging.getLogger(__name__)

_FIRST_BLOCK = 64
_MAX_BLOCK = 1 << 16


@dataclass
class EmpiricalArm:
    index: int
    pulls: int = 0
    successes: int = 0

    @property
    def mean(self) -> float:
        return self.successes / self.pulls if self.pulls else 0.0


@dataclass(frozen=True)
class Elimination:
    """One elimination event of successive elimination."""

    round: int
    arm: int
    mean: float
    leader_mean: float
    radius: float


def naive_pulls(n: int, delta2_known: float, delta: float) -> int:
    """Pulls per arm of uniform sampling: ``ceil(8 / Delta^2 * ln(2n / delta))``."""
    return math.ceil(8.0 / delta2_known ** 2 * math.log(2.0 * n / delta))


def naive(instance: BanditInstance, delta2_known: float, delta: float,
          rng: np.random.Generator) -> Tuple[int, int]:
    """Sample every arm equally often and return the empirical best with the pull total."""
    if delta2_known <= 0.0:
        raise ParameterError(f"known gap {delta2_known} must be positive")
    if not 0.0 < delta < 1.0:
        raise ParameterError(f"delta {delta} outside (0, 1)")
    t = naive_pulls(instance.n, delta2_known, delta)
    successes = rng.binomial(t, np.asarray(instance.p))
    arms = [EmpiricalArm(i, t, int(s)) for i, s in zip(instance.indices, successes)]
    leader = max(arms, key=lambda a: a.mean)
    return leader.index, instance.n * t


def radius(n: int, t, delta: float):
    """Confidence radius ``sqrt(ln(4 n t^2 / delta) / t)`` after ``t`` pulls."""
    t = np.asarray(t, dtype=float)
    return np.sqrt(np.log(4.0 * n * t ** 2 / delta) / t)


def successive_elimination(instance: BanditInstance, delta: float, rng: np.random.Generator, *,
                           trace: Optional[List[Elimination]] = None) -> Tuple[int, int]:
    """Pull active arms in rounds, dropping arms ``2 alpha_t`` behind the leader."""
    if not 0.0 < delta < 1.0:
        raise ParameterError(f"delta {delta} outside (0, 1)")
    n = instance.n
    active = np.arange(n)
    p = np.asarray(instance.p)
    successes = np.zeros(n, dtype=np.int64)
    t = 0
    pulls = 0
    block = _FIRST_BLOCK
    while len(active) > 1:
        draws = rng.random((block, len(active))) < p[active]
        running = successes[active] + np.cumsum(draws, axis=0)
        rounds = t + np.arange(1, block + 1)
        means = running / rounds[:, None]
        alpha = radius(n, rounds, delta)
        behind = means.max(axis=1, keepdims=True) - means
        hits = behind >= 2.0 * alpha[:, None]
        fired = np.flatnonzero(hits.any(axis=1))
        if len(fired) == 0:
            successes[active] = running[-1]
            pulls += block * len(active)
            t += block
            block = min(2 * block, _MAX_BLOCK)
            continue
        row = int(fired[0])
        successes[active] = running[row]
        pulls += (row + 1) * len(active)
        t += row + 1
        if trace is not None:
            leader = float(means[row].max())
            for pos in np.flatnonzero(hits[row]):
                trace.append(Elimination(t, instance.indices[active[pos]],
                                         float(means[row, pos]), leader, float(alpha[row])))
        LOGGER.debug("round %d: eliminated %d arm(s)", t, int(hits[row].sum()))
        active = active[~hits[row]]
    return instance.indices[int(active[0])], pulls
