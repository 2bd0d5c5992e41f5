"""Property suites behind ``main.py validate``.

Each suite draws its cases from a seeded stream, checks one guarantee of
the library and reports a :class:`SuiteResult`.  The ``quick`` level
runs small case counts; ``full`` runs the acceptance-scale counts and
adds the gate-level cross-check of the branch backend.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from .amp_est import QpeConfig, beta1_largest_rise, gae
from .bai import locate
from .bounds import check_overlap_inequality
from .branch import total_variation
from .constants import locate_round_bound
from .errors import ParameterError, SeparationError
from .gates import gate_level_run
from .montecarlo import success_floor
from .oracle import BanditInstance, hardness, make_instance
from .streams import trial_rng
from .vta import VtaParams, arm_sets, flag_mass_by_arm, run_vta

LOGGER = logging.getLogger(__name__)

LEVELS = ("quick", "full")
MAX_EXAMPLES = 5

# cases per suite at each level
_COUNTS = {
    "quick": {"gae": 500, "success": 20, "overlap": 10_000, "shrink": (2, 40)},
    "full": {"gae": 10_000, "success": 200, "overlap": 100_000, "shrink": (10, 1000)},
}

SHRINK_INSTANCES = (
    (0.9, 0.1),
    (0.8, 0.5),
    (0.7, 0.4, 0.3),
    (0.6, 0.35, 0.3, 0.2),
    (0.75, 0.55),
    (0.5, 0.2, 0.1),
    (0.85, 0.6, 0.55, 0.4),
    (0.65, 0.3),
    (0.95, 0.7, 0.2),
    (0.4, 0.15),
)


@dataclass
class SuiteResult:
    name: str
    passed: bool = True
    checked: int = 0
    violations: int = 0
    failures: List[str] = field(default_factory=list)
    seconds: float = 0.0

    def fail(self, message: str) -> None:
        self.passed = False
        self.violations += 1
        if len(self.failures) < MAX_EXAMPLES:
            self.failures.append(message)


def _log_uniform(rng: np.random.Generator, lo: float, hi: float) -> float:
    return float(math.exp(rng.uniform(math.log(lo), math.log(hi))))


def _random_instance(rng: np.random.Generator, n: int, lo: float = 0.01, hi: float = 0.99) -> BanditInstance:
    return make_instance([float(x) for x in rng.uniform(lo, hi, n)])


def gae_suite(count: int, seed: int) -> SuiteResult:
    """``beta1 <= delta`` when ``p >= l - eps`` and ``beta0 <= delta`` when ``p < l - 2 eps``.

    Also checks that ``beta1`` off the gap band never rises by more than
    ``delta`` between neighbouring grid points.
    """
    result = SuiteResult("gae")
    rng = trial_rng(seed, 0)
    for _ in range(count):
        p = float(rng.uniform(0.0, 1.0))
        eps = _log_uniform(rng, 0.02, 0.5)
        delta = _log_uniform(rng, 1e-4, 0.5)
        l = float(rng.uniform(0.01, 0.99))
        outcome = gae(p, eps, delta, l)
        if p >= l - eps:
            result.checked += 1
            if outcome.beta1 > delta + 1e-12:
                result.fail(f"beta1={outcome.beta1:.3e} > delta={delta:.3e} at p={p:.6f} eps={eps:.4f} l={l:.4f}")
        elif p < l - 2.0 * eps:
            result.checked += 1
            if outcome.beta0 > delta + 1e-12:
                result.fail(f"beta0={outcome.beta0:.3e} > delta={delta:.3e} at p={p:.6f} eps={eps:.4f} l={l:.4f}")
    # beta1 along a 100-point grid, one setting per hundred cases
    for _ in range(max(1, count // 100)):
        eps = _log_uniform(rng, 0.02, 0.5)
        delta = _log_uniform(rng, 1e-4, 0.5)
        l = float(rng.uniform(0.01, 0.99))
        result.checked += 1
        rise = beta1_largest_rise(eps, delta, l)
        if rise > delta:
            result.fail(f"beta1 rises by {rise:.3e} > delta={delta:.3e} off the gap at eps={eps:.4f} l={l:.4f}")
    return result


def success_suite(count: int, seed: int) -> SuiteResult:
    """Closed-form success probability and per-arm flag semantics of the variable-time run."""
    result = SuiteResult("success")
    rng = trial_rng(seed, 1)
    for case in range(count):
        n = int(rng.integers(1, 17))
        instance = _random_instance(rng, n)
        gap = float(rng.uniform(0.05, 0.5))
        l1 = float(rng.uniform(gap + 0.01, 0.99))
        params = VtaParams(l1 - gap, l1, _log_uniform(rng, 1e-3, 0.1), n)
        run = run_vta(instance, params)
        result.checked += 1
        profile = run.profile
        slack = 2.0 * params.alpha / n + 1e-10
        if abs(profile.psucc - profile.psucc_prime) > slack:
            result.fail(f"case {case}: |psucc - psucc'| = {abs(profile.psucc - profile.psucc_prime):.3e} > {slack:.3e}")
        if not run.state.is_normalized():
            result.fail(f"case {case}: output norm {run.state.norm_squared():.12f}")
        sets = arm_sets(instance, params)
        per_arm = flag_mass_by_arm(run.state)
        leak = (2.0 * params.m * params.a) ** 2
        for arm in sets.s_right:
            if per_arm[arm] < 1.0 - leak:
                result.fail(f"case {case}: arm {arm} above l1 keeps flag mass {per_arm[arm]:.6f}")
        for arm in sets.s_left:
            if per_arm[arm] > leak:
                result.fail(f"case {case}: arm {arm} below the gap keeps flag mass {per_arm[arm]:.6f}")
    return result


def backend_cases(seed: int) -> List[Tuple[BanditInstance, float, float, Tuple[int, ...]]]:
    """Gate-level configurations that fit the qubit budget: ``(instance, l2, l1, phase bits)``."""
    rng = trial_rng(seed, 2)
    cases = []
    for n in (2, 3, 4):
        for l2, l1 in ((0.1, 0.6), (0.25, 0.8), (0.3, 0.9)):
            for bits in ((2, 2, 2), (3, 2, 2)):
                cases.append((_random_instance(rng, n, 0.05, 0.95), l2, l1, bits))
        cases.append((_random_instance(rng, n, 0.05, 0.95), 0.3, 0.65, (2, 2, 2, 2)))
    return cases


def backend_suite(seed: int, alpha: float = 0.05) -> SuiteResult:
    """Gate-by-gate and branch executions give the same (arm, clock, flag) law."""
    result = SuiteResult("backend")
    for case, (instance, l2, l1, bits) in enumerate(backend_cases(seed)):
        gate_state = gate_level_run(instance, l2, l1, alpha, bits)
        configs = [QpeConfig(2 ** b, 1) for b in bits]
        run = run_vta(instance, VtaParams(l2, l1, alpha, instance.n), configs=configs)
        distance = total_variation(gate_state.outcome_distribution(), run.state.outcome_distribution())
        result.checked += 1
        if distance > 1e-9:
            result.fail(f"case {case} (n={instance.n}, l2={l2}, l1={l1}, bits={bits}): TV {distance:.3e}")
    return result


def overlap_suite(count: int, seed: int) -> SuiteResult:
    """The overlap inequality on random triples, and its tightness at ``p1 = p2 = p_floor``."""
    result = SuiteResult("overlap")
    rng = trial_rng(seed, 3)
    for _ in range(count):
        p_floor = float(rng.uniform(1e-3, 0.5))
        p1, p2 = (float(x) for x in rng.uniform(p_floor, 1.0 - p_floor, 2))
        lhs, rhs, holds = check_overlap_inequality(p1, p2, p_floor)
        result.checked += 1
        if not holds:
            result.fail(f"lhs {lhs:.6e} > rhs {rhs:.6e} at p1={p1:.6f} p2={p2:.6f} floor={p_floor:.6f}")
    for p_floor in (0.05, 0.1, 0.25, 0.4):
        lhs, rhs, _ = check_overlap_inequality(p_floor, p_floor, p_floor)
        result.checked += 1
        if abs(lhs - rhs) > 1e-12:
            result.fail(f"no equality at p1 = p2 = {p_floor}: {lhs:.3e} vs {rhs:.3e}")
        # both sides share the slope 1/c(p_floor) at the diagonal
        lhs, rhs, _ = check_overlap_inequality(p_floor, p_floor + 1e-7, p_floor)
        result.checked += 1
        if abs(lhs / rhs - 1.0) > 1e-5:
            result.fail(f"ratio {lhs / rhs:.8f} away from 1 next to p_floor={p_floor}")
    return result


def _locate_trial(instance: BanditInstance, delta: float, rng: np.random.Generator) -> Tuple[bool, int]:
    transcript: list = []
    try:
        i1, i2 = locate(instance, delta, rng, transcript=transcript)
    except SeparationError:
        return False, len(transcript)
    top, second = instance.sorted_biases()[:2]
    ok = top in i1 and second in i2 and i1.lo - i2.hi >= 2.0 * i1.width
    return ok, len(transcript)


def shrink_suite(instances: int, trials: int, seed: int, delta: float = 0.05) -> SuiteResult:
    """Locate intervals hold the top two biases and separate within the round bound."""
    result = SuiteResult("shrink")
    floor = success_floor(1.0 - delta, trials)
    for number, biases in enumerate(SHRINK_INSTANCES[:instances]):
        instance = make_instance(biases)
        bound = locate_round_bound(hardness(instance).delta2)
        successes = 0
        for trial in range(trials):
            ok, rounds = _locate_trial(instance, delta, trial_rng(seed, 4, number, trial))
            result.checked += 1
            if ok:
                successes += 1
                if rounds > bound:
                    result.fail(f"instance {number} trial {trial}: {rounds} rounds > {bound}")
        rate = successes / trials
        LOGGER.info("shrink instance %d: success rate %.4f (floor %.4f)", number, rate, floor)
        if rate < floor:
            result.fail(f"instance {number}: success rate {rate:.4f} below {floor:.4f}")
    return result


def _timed(suite: Callable[[], SuiteResult]) -> SuiteResult:
    start = time.perf_counter()
    result = suite()
    result.seconds = time.perf_counter() - start
    LOGGER.info("suite %s: %s (%d checks, %.2fs)", result.name,
                "pass" if result.passed else "FAIL", result.checked, result.seconds)
    return result


def run_suites(level: str = "quick", seed: int = 0) -> List[SuiteResult]:
    """Run every suite of ``level`` in a fixed order."""
    if level not in LEVELS:
        raise ParameterError(f"unknown validation level '{level}'")
    counts = _COUNTS[level]
    shrink_instances, shrink_trials = counts["shrink"]
    suites: List[Callable[[], SuiteResult]] = [
        lambda: gae_suite(counts["gae"], seed),
        lambda: success_suite(counts["success"], seed),
        lambda: overlap_suite(counts["overlap"], seed),
        lambda: shrink_suite(shrink_instances, shrink_trials, seed),
    ]
    if level == "full":
        suites.insert(2, lambda: backend_suite(seed))
    return [_timed(suite) for suite in suites]


def summary(results: Sequence[SuiteResult], level: str) -> Dict:
    """JSON-ready summary of a validation run."""
    return {
        "level": level,
        "passed": all(r.passed for r in results),
        "failed_suites": [r.name for r in results if not r.passed],
        "suites": [asdict(r) for r in results],
    }
