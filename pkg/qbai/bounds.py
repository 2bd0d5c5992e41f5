"""Adversary lower bound for quantum best-arm identification.

The bound is computed in closed form from a family of hard instances:
starting from a base instance, variant ``x`` raises arm ``x`` to
``p_1 + eta`` with ``eta = p (p_1 - p_2) / 2`` so that it becomes the
unique best arm.  Any algorithm telling the variants apart with error
``delta`` needs at least

    (1 - 2 sqrt(delta (1 - delta))) / (1 + 2 / c(p - eta)) * sqrt(sum_x 1 / Delta'_x^2)

queries, where ``Delta'_x = p_1 + eta - p_x`` and ``c(x) = 2 sqrt(x (1 - x))``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

from .errors import BoundMismatchError, InstanceError, ParameterError
from .ledger import QueryLedger
from .oracle import BanditInstance, hardness, make_instance

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class HardFamily:
    base: BanditInstance
    p_floor: float
    eta: float
    variants: Tuple[BanditInstance, ...]


@dataclass(frozen=True)
class AdversaryBound:
    intermediate: float
    simplified: float


@dataclass(frozen=True)
class BoundReport:
    lower_bound: float
    modeled_cost: float
    ratio: float
    holds: bool


def overlap(x: float) -> float:
    """``c(x) = 2 sqrt(x (1 - x))``."""
    return 2.0 * math.sqrt(x * (1.0 - x))


def _check_floor(instance: BanditInstance, p_floor: float) -> None:
    if not 0.0 < p_floor < 0.5:
        raise ParameterError(f"p_floor {p_floor} outside (0, 1/2)")
    for p in instance.p:
        if not p_floor <= p <= 1.0 - p_floor:
            raise InstanceError(f"bias {p} outside [{p_floor}, {1.0 - p_floor}]")


def _eta(instance: BanditInstance, p_floor: float) -> float:
    ordered = instance.sorted_biases()
    return p_floor * (ordered[0] - ordered[1]) / 2.0


def hard_family(instance: BanditInstance, p_floor: float) -> HardFamily:
    """Build the variants; the variant of arm ``x`` has ``x`` as its best arm."""
    _check_floor(instance, p_floor)
    eta = _eta(instance, p_floor)
    top = max(instance.p)
    variants = []
    for pos, index in enumerate(instance.indices):
        if index == instance.best:
            variants.append(instance)
            continue
        biases = list(instance.p)
        biases[pos] = top + eta
        variants.append(make_instance(biases))
    return HardFamily(instance, p_floor, eta, tuple(variants))


def adversary_bound(instance: BanditInstance, delta: float, p_floor: float) -> AdversaryBound:
    """Return the sharper intermediate bound and the simplified display form."""
    _check_floor(instance, p_floor)
    if not 0.0 < delta < 0.5:
        raise ParameterError(f"delta {delta} outside (0, 1/2)")
    ordered = instance.sorted_biases()
    top = ordered[0]
    eta = _eta(instance, p_floor)
    success = 1.0 - 2.0 * math.sqrt(delta * (1.0 - delta))
    shifted = math.sqrt(sum(1.0 / (top + eta - p) ** 2 for p in ordered[1:]))
    intermediate = success / (1.0 + 2.0 / overlap(p_floor - eta)) * shifted
    plain = math.sqrt(hardness(instance).H)
    simplified = 0.8 * success / (1.0 + 2.0 / overlap(p_floor / 2.0)) * plain
    return AdversaryBound(intermediate=intermediate, simplified=simplified)


def check_overlap_inequality(p1: float, p2: float, p_floor: float) -> Tuple[float, float, bool]:
    """Compare ``|sqrt((1-p1)p2) - sqrt((1-p2)p1)|`` with ``|p1 - p2| / c(p_floor)``."""
    if not 0.0 < p_floor <= 0.5:
        raise ParameterError(f"p_floor {p_floor} outside (0, 1/2]")
    for p in (p1, p2):
        if not p_floor <= p <= 1.0 - p_floor:
            raise ParameterError(f"bias {p} outside [{p_floor}, {1.0 - p_floor}]")
    lhs = abs(math.sqrt((1.0 - p1) * p2) - math.sqrt((1.0 - p2) * p1))
    rhs = abs(p1 - p2) / (2.0 * math.sqrt(p_floor * (1.0 - p_floor)))
    return lhs, rhs, lhs <= rhs + 1e-12


def bound_vs_model(instance: BanditInstance, delta: float, p_floor: float, result=None, *,
                   ledger: Optional[QueryLedger] = None) -> BoundReport:
    """Compare the lower bound with the modeled cost of a best-arm run on ``instance``.

    ``result`` is a finished run; a run that gave up passes its ``ledger``
    instead and skips the instance check.
    """
    if (result is None) == (ledger is None):
        raise ParameterError("give exactly one of a run result and a ledger")
    if result is not None:
        if result.instance != instance:
            raise BoundMismatchError("lower bound and run were computed on different instances")
        ledger = result.ledger
    lower = adversary_bound(instance, delta, p_floor).intermediate
    cost = ledger.modeled_cost
    ratio = cost / lower if lower > 0 else math.inf
    holds = lower <= cost
    if not holds:
        LOGGER.warning("lower bound %.6g above modeled cost %.6g", lower, cost)
    return BoundReport(lower_bound=lower, modeled_cost=cost, ratio=ratio, holds=holds)
