"""Amplitude estimation and gapped amplitude estimation on coin states.

Phase estimation of the Grover iterate of a coin with bias ``p`` (a
``R_y(4 theta)`` rotation, ``theta = arcsin sqrt(p)``) sees the two
eigenphases ``+-theta/pi``.  The coin is an equal-weight superposition
of the two eigenvectors, so the outcome ``y`` on an ``M``-point grid has
law ``(K(y - s) + K(y + s)) / 2`` with ``s = M theta / pi`` and ``K`` the
Fejer kernel.  The reported estimate is ``sin^2(pi y / M)``.

Everything here is computed exactly: the single-run law comes from the
kernel and the law of the median of ``r`` runs from binomial tails.
Nothing is sampled.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from scipy.stats import binom

from .constants import SINGLE_RUN_SUCCESS, coin_angle, fejer_kernel, grid_estimates, kl_bernoulli
from .errors import ParameterError

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class QpeConfig:
    """Grid size ``M = 2^b`` and number ``r`` of median repetitions."""

    m_points: int
    reps: int = 1

    def __post_init__(self) -> None:
        if self.m_points < 2 or self.m_points & (self.m_points - 1):
            raise ParameterError(f"grid size {self.m_points} is not a power of two >= 2")
        if self.reps < 1 or self.reps % 2 == 0:
            raise ParameterError(f"repetition count {self.reps} must be odd and >= 1")

    @property
    def bits(self) -> int:
        return self.m_points.bit_length() - 1


@dataclass(frozen=True)
class GaeOutcome:
    """Amplitudes of the stop bit: ``beta1`` on 1 (stopped), ``beta0`` on 0."""

    beta0: float
    beta1: float


def single_run_pmf(p: float, m_points: int) -> np.ndarray:
    """Return the law of the grid outcome ``y`` of one phase estimation."""
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"bias {p} outside [0, 1]")
    s = m_points * coin_angle(p) / math.pi
    y = np.arange(m_points)
    return 0.5 * (fejer_kernel(y - s, m_points) + fejer_kernel(y + s, m_points))


def qpe_distribution(p: float, config: QpeConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Return ``(values, probs)``: the law of the median bias estimate.

    ``values`` are the distinct folded estimates in increasing order.
    """
    m_points = config.m_points
    pmf = single_run_pmf(p, m_points)
    y = np.arange(m_points)
    folded = np.minimum(y, m_points - y)
    single = np.bincount(folded, weights=pmf, minlength=m_points // 2 + 1)
    values = grid_estimates(m_points)[: m_points // 2 + 1]
    if config.reps == 1:
        return values, single
    half = (config.reps - 1) // 2
    cdf = np.minimum(np.cumsum(single), 1.0)
    median_cdf = binom.sf(half, config.reps, cdf)
    probs = np.diff(np.concatenate(([0.0], median_cdf)))
    return values, probs


def aest_query_cost(config: QpeConfig) -> int:
    """Oracle calls of one amplitude estimation: ``r * 2 * (M - 1)``."""
    return config.reps * 2 * (config.m_points - 1)


def choose_qpe_config(eps: float, delta: float) -> QpeConfig:
    """Smallest grid and odd repetition count reaching precision ``eps``.

    ``delta`` bounds the amplitude of the failure branch, so the median
    must fail with probability at most ``delta^2``.
    """
    if not (0.0 < eps < 1.0 and 0.0 < delta < 1.0):
        raise ParameterError(f"need eps, delta in (0, 1), got {eps}, {delta}")
    m_points = 2
    while 2 * math.pi / m_points + math.pi ** 2 / m_points ** 2 > eps:
        m_points *= 2
    target = delta ** 2
    failure = 1.0 - SINGLE_RUN_SUCCESS
    if failure <= target:
        return QpeConfig(m_points, 1)
    reps = math.ceil(math.log(1.0 / target) / kl_bernoulli(0.5, failure))
    if reps % 2 == 0:
        reps += 1
    return QpeConfig(m_points, reps)


def _stops(estimates: np.ndarray, threshold: float) -> np.ndarray:
    """Stop bit of each grid estimate: set when below the threshold."""
    return estimates < threshold


@lru_cache(maxsize=65536)
def _gae(p: float, eps: float, delta: float, l: float, config: QpeConfig) -> GaeOutcome:
    threshold = l - 1.5 * eps
    pmf = single_run_pmf(p, config.m_points)
    below = _stops(grid_estimates(config.m_points), threshold)
    f_below = min(1.0, float(np.sum(pmf[below])))
    f_above = min(1.0, float(np.sum(pmf[~below])))
    half = (config.reps - 1) // 2
    # each tail directly, so tiny failure masses keep full precision
    beta1_sq = float(binom.sf(half, config.reps, f_below))
    beta0_sq = float(binom.sf(half, config.reps, f_above))
    LOGGER.debug(
        "gae p=%.6g eps=%.4g l=%.4g M=%d r=%d beta1^2=%.3e",
        p, eps, l, config.m_points, config.reps, beta1_sq,
    )
    return GaeOutcome(beta0=math.sqrt(beta0_sq), beta1=math.sqrt(beta1_sq))


def gae(p: float, eps: float, delta: float, l: float,
        config: Optional[QpeConfig] = None) -> GaeOutcome:
    """Gapped amplitude estimation with threshold ``l - 3 eps / 2``.

    Runs amplitude estimation at precision ``eps/4`` and confidence
    ``delta`` unless an explicit ``config`` overrides the grid.  With the
    default config, ``beta1 <= delta`` whenever ``p >= l - eps`` and
    ``beta0 <= delta`` whenever ``p < l - 2 eps``.
    """
    if not (0.0 < eps < 1.0):
        raise ParameterError(f"eps {eps} outside (0, 1)")
    if not (0.0 < delta < 1.0):
        raise ParameterError(f"delta {delta} outside (0, 1)")
    if not (0.0 < l < 1.0):
        raise ParameterError(f"threshold {l} outside (0, 1)")
    if not (0.0 <= p <= 1.0):
        raise ParameterError(f"bias {p} outside [0, 1]")
    if config is None:
        config = choose_qpe_config(eps / 4.0, delta)
    return _gae(float(p), float(eps), float(delta), float(l), config)


def beta1_largest_rise(eps: float, delta: float, l: float, points: int = 100) -> float:
    """Largest increase of ``beta1`` between neighbours of a ``points``-grid on [0, 1].

    Pairs touching the gap band ``(l - 2 eps, l - eps)`` are skipped, since
    phase-estimation sidelobes make ``beta1`` ripple there.  Outside the
    band ``beta1`` is nonincreasing up to a rise of at most ``delta``.
    """
    if points < 2:
        raise ParameterError("the grid needs at least two points")
    grid = np.linspace(0.0, 1.0, points)
    beta1 = np.array([gae(float(p), eps, delta, l).beta1 for p in grid])
    outside = (grid <= l - 2.0 * eps) | (grid >= l - eps)
    pairs = outside[:-1] & outside[1:]
    rises = np.diff(beta1)[pairs]
    return float(max(0.0, rises.max())) if rises.size else 0.0
