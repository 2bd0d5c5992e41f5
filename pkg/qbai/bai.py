"""Fixed-confidence best-arm identification and its variants.

* :func:`shrink` narrows an interval known to hold the ``k``-th largest
  bias to three fifths of its width, using two success-probability
  estimates on the instance extended by a perfect arm.
* :func:`locate` shrinks intervals for the best and second-best biases
  until they are separated by twice their width.
* :func:`best_arm` places the thresholds of a final variable-time run in
  the separating gap and amplifies it.
* :func:`pac_arm` stops Locate early once the intervals are narrow
  enough for an ``eps``-optimal answer.
* :func:`fixed_budget` turns the fixed-confidence algorithm into a
  fixed-budget one by majority vote over budget-capped runs.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .constants import (
    ALPHA_FACTOR,
    CIRCUIT_BREAKER_FACTOR,
    DELTA2_FLOOR,
    SHRINK_DIVISIONS,
    SHRINK_EPS,
    kl_bernoulli,
    locate_round_bound,
)
from .errors import (
    BudgetExceededError,
    BudgetTooSmallError,
    NoDecisionError,
    ParameterError,
    SeparationError,
)
from .ledger import QueryLedger
from .oracle import BanditInstance, append_perfect_arm
from .streams import trial_rng
from .vta import VtaParams, run_vta
from .vtaa_vtae import EstimateMode, amplify, estimate

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.lo <= self.hi <= 1.0):
            raise ParameterError(f"invalid interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __contains__(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def __str__(self) -> str:
        return f"[{self.lo:.6g}, {self.hi:.6g}]"


@dataclass(frozen=True)
class IntervalPair:
    i1: Interval
    i2: Interval
    iteration: int
    current_delta: float

    @property
    def separation(self) -> float:
        return self.i1.lo - self.i2.hi

    @property
    def separated(self) -> bool:
        return self.separation >= 2.0 * self.i1.width


@dataclass(frozen=True)
class ShrinkRecord:
    """Inputs, estimates and decision bits of one Shrink call."""

    k: int
    interval: Interval
    result: Interval
    r1: float
    r2: float
    b1: bool
    b2: bool
    delta: float


@dataclass(frozen=True)
class RoundRecord:
    iteration: int
    delta: float
    first: ShrinkRecord
    second: ShrinkRecord


@dataclass
class BaiResult:
    arm: int
    ledger: QueryLedger
    transcript: List[RoundRecord]
    instance: BanditInstance
    intervals: Tuple[Interval, Interval]
    eps_break: bool = False
    amplify_delta: float = 0.0

    @property
    def rounds(self) -> int:
        return len(self.transcript)

    def failure_budget(self) -> float:
        """Sum of the confidence budgets spent by every Shrink and the final Amplify."""
        shrinks = sum(r.first.delta + r.second.delta for r in self.transcript)
        return shrinks + self.amplify_delta


def _shrink_step(extended: BanditInstance, k: int, interval: Interval, delta: float,
                 rng: np.random.Generator, mode: EstimateMode,
                 ledger: QueryLedger) -> ShrinkRecord:
    n_total = extended.n
    a, b = interval.lo, interval.hi
    eps = interval.width / SHRINK_DIVISIONS
    inner_delta = delta / 2.0
    alpha = ALPHA_FACTOR * inner_delta
    bits = []
    estimates = []
    for low, high in ((a + eps, a + 3 * eps), (a + 2 * eps, a + 4 * eps)):
        run = run_vta(extended, VtaParams(low, high, alpha, n_total))
        r, spent = estimate(run, SHRINK_EPS, inner_delta, mode, rng)
        ledger.absorb(spent)
        estimates.append(r)
        bits.append(r > (k + 0.5) / n_total)
    b1, b2 = bits
    if not b1 and not b2:
        result = Interval(a, a + 3 * eps)
    elif b1 and b2:
        result = Interval(a + 2 * eps, b)
    else:
        result = Interval(a + eps, a + 4 * eps)
    return ShrinkRecord(k, interval, result, estimates[0], estimates[1], b1, b2, delta)


def shrink(instance: BanditInstance, k: int, interval: Interval, delta: float,
           rng: np.random.Generator, *, mode: EstimateMode = EstimateMode.HONEST,
           ledger: Optional[QueryLedger] = None) -> Interval:
    """Return an interval of width ``3/5 |I|`` holding ``p_(k)`` w.p. ``1 - delta``."""
    return _shrink(instance, k, interval, delta, rng, mode, ledger).result


def _shrink(instance, k, interval, delta, rng, mode, ledger) -> ShrinkRecord:
    if k not in (1, 2):
        raise ParameterError(f"shrink tracks the first or second bias, got k={k}")
    if interval.width <= 0.0:
        raise ParameterError("degenerate interval")
    if not 0.0 < delta < 1.0:
        raise ParameterError(f"delta {delta} outside (0, 1)")
    extended = append_perfect_arm(instance)
    return _shrink_step(extended, k, interval, delta, rng, mode,
                        ledger if ledger is not None else QueryLedger())


def circuit_breaker(delta2_floor: float) -> int:
    """Round cap of Locate: four times the round bound at ``delta2_floor``."""
    return CIRCUIT_BREAKER_FACTOR * locate_round_bound(delta2_floor)


def locate(instance: BanditInstance, delta: float, rng: np.random.Generator, *,
           ledger: Optional[QueryLedger] = None,
           transcript: Optional[List[RoundRecord]] = None,
           mode: EstimateMode = EstimateMode.HONEST,
           delta2_floor: float = DELTA2_FLOOR,
           eps_pac: Optional[float] = None) -> Tuple[Interval, Interval]:
    """Shrink intervals for ``p_(1)`` and ``p_(2)`` until they separate.

    With ``eps_pac`` set, the loop also stops once ``|I1| <= eps_pac / 4``.
    """
    if not 0.0 < delta < 1.0:
        raise ParameterError(f"delta {delta} outside (0, 1)")
    if instance.n < 2:
        raise ParameterError("locate needs at least two arms")
    ledger = ledger if ledger is not None else QueryLedger()
    transcript = transcript if transcript is not None else []
    cap = circuit_breaker(delta2_floor)
    pair = IntervalPair(Interval(0.0, 1.0), Interval(0.0, 1.0), 0, delta / 8.0)
    while not pair.separated:
        if eps_pac is not None and pair.i1.width <= eps_pac / 4.0:
            LOGGER.debug("eps-break after %d rounds", pair.iteration)
            break
        # widths stay >= delta2/8 while every estimate holds
        if pair.iteration >= cap or pair.i1.width < delta2_floor / 8.0:
            LOGGER.warning("locate gave up after %d rounds", pair.iteration)
            raise SeparationError("separation not achieved", ledger=ledger)
        first = _shrink(instance, 1, pair.i1, pair.current_delta, rng, mode, ledger)
        second = _shrink(instance, 2, pair.i2, pair.current_delta, rng, mode, ledger)
        transcript.append(RoundRecord(pair.iteration + 1, pair.current_delta, first, second))
        pair = IntervalPair(first.result, second.result, pair.iteration + 1, pair.current_delta / 2.0)
        LOGGER.debug("round %d: I1=%s I2=%s", pair.iteration, pair.i1, pair.i2)
    return pair.i1, pair.i2


def _finish(instance: BanditInstance, l2: float, l1: float, delta: float,
            rng: np.random.Generator, ledger: QueryLedger) -> int:
    run = run_vta(instance, VtaParams(l2, l1, ALPHA_FACTOR * delta, instance.n))
    arm, spent = amplify(run, delta, rng)
    ledger.absorb(spent)
    return arm


def best_arm(instance: BanditInstance, delta: float, rng: np.random.Generator, *,
             mode: EstimateMode = EstimateMode.HONEST,
             delta2_floor: float = DELTA2_FLOOR,
             budget: Optional[float] = None) -> Optional[BaiResult]:
    """Return the best arm with probability at least ``1 - delta``.

    With ``budget`` set the run is abandoned, and ``None`` returned, as
    soon as its modeled cost exceeds the budget.
    """
    return _identify(instance, None, delta, rng, mode, delta2_floor, budget)


def pac_arm(instance: BanditInstance, eps_pac: float, delta: float,
            rng: np.random.Generator, *,
            mode: EstimateMode = EstimateMode.HONEST,
            delta2_floor: float = DELTA2_FLOOR) -> BaiResult:
    """Return an arm within ``eps_pac`` of the best with probability ``1 - delta``."""
    if not 0.0 < eps_pac < 1.0:
        raise ParameterError(f"eps {eps_pac} outside (0, 1)")
    return _identify(instance, eps_pac, delta, rng, mode, delta2_floor, None)


def _identify(instance, eps_pac, delta, rng, mode, delta2_floor, budget) -> Optional[BaiResult]:
    if not 0.0 < delta < 1.0:
        raise ParameterError(f"delta {delta} outside (0, 1)")
    ledger = QueryLedger(cap=budget)
    transcript: List[RoundRecord] = []
    half = delta / 2.0
    if instance.n == 1:
        return BaiResult(instance.indices[0], ledger, transcript, instance,
                         (Interval(0.0, 1.0), Interval(0.0, 1.0)))
    try:
        i1, i2 = locate(instance, half, rng, ledger=ledger, transcript=transcript,
                        mode=mode, delta2_floor=delta2_floor, eps_pac=eps_pac)
        pair = IntervalPair(i1, i2, len(transcript), 0.0)
        eps_break = not pair.separated
        l1 = i1.lo
        if eps_break:
            if l1 <= 0.0:
                # every arm is eps-optimal
                arm = int(rng.choice(np.array(instance.indices)))
                return BaiResult(arm, ledger, transcript, instance, (i1, i2), True)
            l2 = max(l1 - eps_pac / 4.0, l1 / 2.0)
        else:
            l2 = i2.hi
        arm = _finish(instance, l2, l1, half, rng, ledger)
    except BudgetExceededError:
        if budget is None:
            raise
        LOGGER.debug("capped run stopped at modeled cost %g", ledger.modeled_cost)
        return None
    return BaiResult(arm, ledger, transcript, instance, (i1, i2), eps_break, half)


def plan_fixed_budget(budget: float, tc_table: Mapping[float, float]) -> Tuple[float, int]:
    """Pick ``delta*`` minimizing ``exp(-floor(T/Tc) D(1/2 || delta))``; return it with the run count."""
    if not tc_table:
        raise ParameterError("the Tc table is empty")
    best: Optional[Tuple[float, float, int]] = None
    for delta in sorted(tc_table):
        runs = math.floor(budget / tc_table[delta])
        if runs < 1:
            continue
        bound = math.exp(-runs * kl_bernoulli(0.5, delta))
        if best is None or bound < best[0]:
            best = (bound, delta, runs)
    if best is None:
        raise BudgetTooSmallError("budget too small")
    return best[1], best[2]


def fixed_budget_bound(budget: float, tc_table: Mapping[float, float]) -> float:
    """Failure probability guaranteed by the plan for ``budget``."""
    delta, runs = plan_fixed_budget(budget, tc_table)
    return math.exp(-runs * kl_bernoulli(0.5, delta))


def majority_vote(votes: Sequence[Optional[int]]) -> Optional[int]:
    """Plurality winner; ties go to the smallest arm index, ``None`` loses ties."""
    counts = Counter(votes)
    top = max(counts.values())
    winners = [v for v, c in counts.items() if c == top]
    arms = sorted(v for v in winners if v is not None)
    return arms[0] if arms else None


def fixed_budget(instance: BanditInstance, budget: float, tc_table: Mapping[float, float],
                 rng: np.random.Generator, *,
                 mode: EstimateMode = EstimateMode.HONEST,
                 delta2_floor: float = DELTA2_FLOOR) -> int:
    """Spend ``budget`` on independent capped runs and return the majority arm."""
    delta, runs = plan_fixed_budget(budget, tc_table)
    cap = tc_table[delta]
    LOGGER.debug("fixed budget %g: %d run(s) at delta=%g, cap %g", budget, runs, delta, cap)
    votes: List[Optional[int]] = []
    for _ in range(runs):
        try:
            result = best_arm(instance, delta, rng, mode=mode, delta2_floor=delta2_floor, budget=cap)
        except SeparationError as exc:
            LOGGER.debug("capped run abstains: %s", exc)
            result = None
        votes.append(None if result is None else result.arm)
    winner = majority_vote(votes)
    if winner is None:
        raise NoDecisionError("no decision")
    return winner


def calibrate_tc(instance: BanditInstance, deltas: Sequence[float], trials: int, seed: int, *,
                 mode: EstimateMode = EstimateMode.HONEST,
                 delta2_floor: float = DELTA2_FLOOR) -> Dict[float, float]:
    """Empirical ``1 - delta`` quantile of the modeled cost of :func:`best_arm`."""
    if trials < 1:
        raise ParameterError("calibration needs at least one trial")
    table: Dict[float, float] = {}
    for slot, delta in enumerate(sorted(deltas)):
        costs = []
        for trial in range(trials):
            rng = trial_rng(seed, slot, trial)
            try:
                result = best_arm(instance, delta, rng, mode=mode, delta2_floor=delta2_floor)
                costs.append(result.ledger.modeled_cost)
            except SeparationError as exc:
                costs.append(exc.ledger.modeled_cost if exc.ledger is not None else math.inf)
        table[delta] = float(np.quantile(costs, 1.0 - delta, method="higher"))
        LOGGER.info("Tc(%g) = %.6g over %d trials", delta, table[delta], trials)
    return table
