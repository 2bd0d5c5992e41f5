"""Amplify and Estimate on top of a variable-time run.

Amplitude amplification of a unitary ``A`` with good-subspace projector
``Pi`` never leaves ``span{Pi A|0>, (1 - Pi) A|0>}``.  The amplified
output is therefore known exactly from the branch state: it is the
normalized flag-1 component, reached with the success probability of a
two-dimensional rotation.  The nested variable-time circuits are not
built; their cost is charged from the cost formulas below and reported
as ``modeled_cost``.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import EmptySuccessError, ParameterError
from .ledger import QueryLedger
from .vta import VtaProfile, VtaRun, success_marginal

LOGGER = logging.getLogger(__name__)


class EstimateMode(enum.Enum):
    HONEST = "honest"
    ADVERSARIAL_LOW = "adversarial-low"
    ADVERSARIAL_HIGH = "adversarial-high"


@dataclass(frozen=True)
class CostModel:
    """Variable-time costs of one amplification and one estimation."""

    Q: float
    amplify_cost: float
    estimate_cost: float
    r_rep: int


def repetitions(delta: float) -> int:
    """``ceil(log2(2/delta))`` independent amplification attempts."""
    return math.ceil(math.log2(2.0 / delta))


def cost_model(profile: VtaProfile, eps: float, delta: float) -> CostModel:
    """Return ``Q`` and the amplify and estimate costs for ``profile``.

    ``eps == 0`` asks for an exact estimate, whose cost is infinite.
    """
    if profile.psucc <= 0.0:
        raise EmptySuccessError("empty success subspace")
    if not 0.0 < delta < 1.0:
        raise ParameterError(f"delta {delta} outside (0, 1)")
    t_max = profile.t_max
    log_t = math.log2(t_max)
    q = t_max * log_t + profile.t_avg / math.sqrt(profile.psucc) * log_t
    r_rep = repetitions(delta)
    if eps == 0.0:
        estimate_cost = math.inf
    else:
        estimate_cost = q / eps * log_t ** 2 * math.log2(math.log2(t_max / delta))
    return CostModel(Q=q, amplify_cost=r_rep * q, estimate_cost=estimate_cost, r_rep=r_rep)


def rotation_schedule(psucc: float) -> Tuple[int, float]:
    """Return the Grover iteration count ``k`` and the resulting success probability.

    ``k`` is the integer closest to the quarter turn, so the success
    probability ``sin^2((2k+1) theta)`` is at least 1/2.
    """
    theta = math.asin(math.sqrt(min(1.0, psucc)))
    k = max(0, int(round(math.pi / (4.0 * theta) - 0.5)))
    return k, math.sin((2 * k + 1) * theta) ** 2


def amplify(run: VtaRun, delta: float, rng: np.random.Generator) -> Tuple[int, QueryLedger]:
    """Sample an arm from the amplified flag-1 state of ``run``.

    Up to ``ceil(log2(2/delta))`` attempts are made; if all of them fail
    the arm register of the unamplified state is measured instead.
    """
    profile = run.profile
    if profile.psucc <= 0.0:
        raise EmptySuccessError("empty success subspace")
    costs = cost_model(profile, 1.0, delta)
    k, p_attempt = rotation_schedule(profile.psucc)
    marginal = success_marginal(run)
    arms = np.array(sorted(marginal))
    weights = np.array([marginal[a] for a in arms])
    weights = weights / weights.sum()

    attempts = 0
    arm = None
    while attempts < costs.r_rep:
        attempts += 1
        if rng.random() < p_attempt:
            arm = int(rng.choice(arms, p=weights))
            break
    if arm is None:
        LOGGER.debug("all %d amplification attempts failed", attempts)
        arm = int(rng.choice(np.array(run.instance.indices)))

    ledger = QueryLedger()
    ledger.charge("amplify", attempts * (2 * k + 1) * profile.t_max, costs.amplify_cost)
    return arm, ledger


def estimate(run: VtaRun, eps: float, delta: float, mode: EstimateMode,
             rng: np.random.Generator) -> Tuple[float, QueryLedger]:
    """Estimate the success probability of ``run`` to relative precision ``eps``.

    Honest estimates are ``psucc (1 + u)`` with ``u`` uniform on
    ``[-eps, eps]``, except with probability ``delta`` where any value in
    ``[0, 2]`` may come back.  The adversarial modes return the edges of
    the guaranteed window ``(1 -+ eps)(p'succ -+ 0.1/n)``.
    """
    if not 0.0 <= eps < 1.0:
        raise ParameterError(f"eps {eps} outside [0, 1)")
    profile = run.profile
    n = run.params.n_arms
    ledger = QueryLedger()
    if eps == 0.0 or delta == 0.0:
        if mode is EstimateMode.HONEST:
            ledger.charge("estimate", profile.t_max, math.inf)
            return profile.psucc, ledger
        raise ParameterError("adversarial estimates need eps > 0 and delta > 0")
    costs = cost_model(profile, eps, delta)
    ledger.charge("estimate", profile.t_max, costs.estimate_cost)
    if mode is EstimateMode.ADVERSARIAL_LOW:
        return (1.0 - eps) * (profile.psucc_prime - 0.1 / n), ledger
    if mode is EstimateMode.ADVERSARIAL_HIGH:
        return (1.0 + eps) * (profile.psucc_prime + 0.1 / n), ledger
    if rng.random() < delta:
        value = float(rng.uniform(0.0, 2.0))
        LOGGER.debug("estimate failure branch returned %.5g", value)
        return value, ledger
    return profile.psucc * (1.0 + float(rng.uniform(-eps, eps))), ledger
