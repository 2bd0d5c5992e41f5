"""The variable-time algorithm A(O, l2, l1, alpha) on the branch backend.

The algorithm prepares the uniform superposition over arms with each
arm's coin attached and the flag set, then runs ``m`` stages.  Stage
``j`` applies gapped amplitude estimation with precision ``2^-j`` and
confidence ``a`` to every branch that has not stopped yet; a branch
whose estimate falls below ``l1 - 3 eps_j / 2`` stops, which clears its
flag.  Branches that never stop are marked in clock slot ``m + 1``.

Arms never interact, so for arm ``i`` with stage outcomes
``(beta0_ij, beta1_ij)`` the output has one component per stopping
stage ``j`` with amplitude ``n^-1/2 prod_{k<j} beta0_ik * beta1_ij`` and
flag 0, and one never-stopped component with amplitude
``n^-1/2 prod_k beta0_ik`` and flag 1.  :func:`run_vta` builds exactly
that state; no sampling happens inside the algorithm.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from .amp_est import QpeConfig, aest_query_cost, choose_qpe_config, gae
from .branch import BranchState, project_flag
from .errors import ParameterError
from .ledger import QueryLedger
from .oracle import BanditInstance

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class VtaParams:
    """Thresholds ``l2 < l1``, approximation ``alpha`` and arm count."""

    l2: float
    l1: float
    alpha: float
    n_arms: int

    def __post_init__(self) -> None:
        if not (0.0 < self.l2 < self.l1 < 1.0):
            raise ParameterError(f"need 0 < l2 < l1 < 1, got l2={self.l2}, l1={self.l1}")
        if not (0.0 < self.alpha < 1.0):
            raise ParameterError(f"alpha {self.alpha} outside (0, 1)")
        if self.n_arms < 1:
            raise ParameterError("a variable-time run needs at least one arm")

    @property
    def delta(self) -> float:
        return self.l1 - self.l2

    @property
    def m(self) -> int:
        return math.ceil(math.log2(1.0 / self.delta)) + 2

    @property
    def a(self) -> float:
        return self.alpha / (2.0 * self.m * self.n_arms ** 1.5)

    def stage_eps(self, j: int) -> float:
        return 2.0 ** -j


@dataclass(frozen=True)
class ArmSets:
    """Partition of the arms by bias relative to ``l1``."""

    s_left: FrozenSet[int]
    s_mid: FrozenSet[int]
    s_right: FrozenSet[int]

    @property
    def s_lm(self) -> FrozenSet[int]:
        return self.s_left | self.s_mid

    @property
    def s_mr(self) -> FrozenSet[int]:
        return self.s_mid | self.s_right


@dataclass(frozen=True)
class VtaProfile:
    """Stopping times, halting probabilities and success probabilities."""

    t: Tuple[int, ...]
    w: Tuple[float, ...]
    t_avg: float
    psucc: float
    psucc_prime: float

    @property
    def t_max(self) -> int:
        return self.t[-1]


@dataclass(frozen=True, eq=False)
class VtaRun:
    instance: BanditInstance
    params: VtaParams
    state: BranchState
    profile: VtaProfile
    ledger: QueryLedger
    configs: Tuple[QpeConfig, ...]


def stage_configs(params: VtaParams) -> List[QpeConfig]:
    """Amplitude-estimation config of each stage: precision ``eps_j/4``, confidence ``a``."""
    return [choose_qpe_config(params.stage_eps(j) / 4.0, params.a) for j in range(1, params.m + 1)]


def arm_sets(instance: BanditInstance, params: VtaParams) -> ArmSets:
    """Classify arms into ``S_<``, ``S_-`` and ``S_>`` from their true biases."""
    lower = params.l1 - params.delta / 2.0
    upper = params.l1 - params.delta / 8.0
    left, mid, right = set(), set(), set()
    for index, p in zip(instance.indices, instance.p):
        if p < lower:
            left.add(index)
        elif p < upper:
            mid.add(index)
        else:
            right.add(index)
    return ArmSets(frozenset(left), frozenset(mid), frozenset(right))


def stopping_times(configs: Sequence[QpeConfig]) -> Tuple[int, ...]:
    """Return ``t_1..t_{m+1}``: one initial query plus the stage costs so far."""
    t = 1 + np.cumsum([aest_query_cost(c) for c in configs])
    return tuple(int(x) for x in t) + (int(t[-1]),)


def _arm_branch(p: float, params: VtaParams, configs: Sequence[QpeConfig]):
    """Return clock, garbage, flag and real amplitude columns of one arm."""
    m = params.m
    survive = 1.0
    clocks, garbages, flags, amps = [], [], [], []
    for j, config in enumerate(configs, start=1):
        outcome = gae(p, params.stage_eps(j), params.a, params.l1, config=config)
        clocks.append(j)
        garbages.append(2 * j + 1)
        flags.append(0)
        amps.append(survive * outcome.beta1)
        survive *= outcome.beta0
    clocks.append(m + 1)
    garbages.append(2 * m)
    flags.append(1)
    amps.append(survive)
    return clocks, garbages, flags, amps


@lru_cache(maxsize=4096)
def _execute(instance: BanditInstance, params: VtaParams,
             configs: Tuple[QpeConfig, ...]) -> Tuple[BranchState, VtaProfile]:
    n = instance.n
    scale = 1.0 / math.sqrt(n)
    arm, clock, garbage, flag, amp = [], [], [], [], []
    for index, p in zip(instance.indices, instance.p):
        c, g, f, a = _arm_branch(p, params, configs)
        arm.extend([index] * len(c))
        clock.extend(c)
        garbage.extend(g)
        flag.extend(f)
        amp.extend(scale * x for x in a)
    state = BranchState(arm, clock, garbage, flag, amp, n)
    profile = _profile(instance, params, configs, state)
    return state, profile


def _profile(instance: BanditInstance, params: VtaParams,
             configs: Sequence[QpeConfig], state: BranchState) -> VtaProfile:
    t = stopping_times(configs)
    w = state.clock_masses(params.m + 1)
    t_avg = math.sqrt(float(np.sum(w * np.asarray(t, dtype=float) ** 2)))
    _, psucc = project_flag(state, 1)
    return VtaProfile(
        t=t,
        w=tuple(float(x) for x in w),
        t_avg=t_avg,
        psucc=psucc,
        psucc_prime=psucc_closed_form(instance, params, state),
    )


def run_vta(instance: BanditInstance, params: VtaParams,
            configs: Optional[Sequence[QpeConfig]] = None) -> VtaRun:
    """Execute the variable-time algorithm and charge ``t_{m+1}`` raw calls.

    ``configs`` overrides the per-stage amplitude-estimation grids; the
    gate-level cross-check uses it to match small phase registers.
    """
    if params.n_arms != instance.n:
        raise ParameterError(f"params built for {params.n_arms} arms, instance has {instance.n}")
    configs = tuple(configs) if configs is not None else tuple(stage_configs(params))
    if len(configs) != params.m:
        raise ParameterError(f"need {params.m} stage configs, got {len(configs)}")
    state, profile = _execute(instance, params, configs)
    ledger = QueryLedger()
    ledger.charge("vta.init", 1)
    for j, config in enumerate(configs, start=1):
        ledger.charge(f"vta.gae.{j}", aest_query_cost(config))
    LOGGER.debug(
        "vta n=%d l2=%.5g l1=%.5g m=%d t_max=%d psucc=%.5g",
        instance.n, params.l2, params.l1, params.m, profile.t_max, profile.psucc,
    )
    return VtaRun(instance, params, state, profile, ledger, configs)


def flag_mass_by_arm(state: BranchState) -> Dict[int, float]:
    """Return, per arm, the flag-1 mass normalized within the arm's branch."""
    totals = state.arm_masses()
    good = state.select(state.flag == 1).arm_masses()
    return {arm: good.get(arm, 0.0) / mass for arm, mass in totals.items() if mass > 0}


def psucc_closed_form(instance: BanditInstance, params: VtaParams, state: BranchState) -> float:
    """Return ``(|S_>| + sum_{S_-} |beta_i1|^2) / n`` read off ``state``."""
    sets = arm_sets(instance, params)
    per_arm = flag_mass_by_arm(state)
    return (len(sets.s_right) + sum(per_arm.get(i, 0.0) for i in sets.s_mid)) / instance.n


def stopping_profile(run: VtaRun) -> VtaProfile:
    """Return the profile of a completed run."""
    return run.profile


def success_marginal(run: VtaRun) -> Dict[int, float]:
    """Arm law of the normalized flag-1 projection of the output state."""
    good, mass = project_flag(run.state, 1)
    if mass == 0.0:
        return {}
    return good.arm_masses()


def stopping_time_scalings(instance: BanditInstance, params: VtaParams) -> Tuple[float, float]:
    """Reference scalings of ``t_{m+1}`` and ``t_avg^2`` (constants omitted).

    Returns ``(log2(1/a) / Delta, (|S_>|/Delta^2 + sum_{S_lm}(l1 - p_i)^-2) log2^2(1/a) / n)``.
    """
    sets = arm_sets(instance, params)
    log_a = math.log2(1.0 / params.a)
    tail = sum(
        (params.l1 - p) ** -2
        for index, p in zip(instance.indices, instance.p)
        if index in sets.s_lm
    )
    t_max = log_a / params.delta
    t_avg_sq = (len(sets.s_right) / params.delta ** 2 + tail) * log_a ** 2 / instance.n
    return t_max, t_avg_sq
