"""Helpers for reading Monte Carlo success counts."""

from __future__ import annotations

import math
from typing import Tuple

from scipy.stats import binomtest


def sigma(rate: float, trials: int) -> float:
    """Binomial standard deviation of an empirical rate."""
    return math.sqrt(rate * (1.0 - rate) / trials)


def success_floor(target: float, trials: int) -> float:
    """Lowest empirical success rate consistent with ``target`` at 3 sigma."""
    return target - 3.0 * sigma(target, trials)


def binomial_ci(successes: int, trials: int, level: float = 0.95) -> Tuple[float, float]:
    """Clopper-Pearson interval of a success count."""
    interval = binomtest(successes, trials).proportion_ci(confidence_level=level)
    return float(interval.low), float(interval.high)
