"""Tests for the variable-time algorithm on the branch backend."""

import math

import pytest

from qbai.amp_est import QpeConfig, aest_query_cost
from qbai.errors import ParameterError
from qbai.oracle import make_instance
from qbai.vta import (
    VtaParams,
    arm_sets,
    flag_mass_by_arm,
    psucc_closed_form,
    run_vta,
    stage_configs,
    stopping_profile,
    stopping_time_scalings,
    stopping_times,
    success_marginal,
)


@pytest.mark.parametrize("l2, l1, alpha", [(0.6, 0.4, 0.01), (0.0, 0.5, 0.01), (0.2, 1.0, 0.01), (0.2, 0.5, 0.0)])
def test_params_validation(l2, l1, alpha):
    """Thresholds must satisfy 0 < l2 < l1 < 1 and alpha lies in (0, 1)."""
    with pytest.raises(ParameterError):
        VtaParams(l2, l1, alpha, 2)


def test_derived_params():
    """Stage count and per-stage confidence."""
    params = VtaParams(0.4, 0.6, 0.01, 2)
    assert params.delta == pytest.approx(0.2)
    assert params.m == 5
    assert params.a == pytest.approx(0.01 / (2 * 5 * 2 ** 1.5))
    assert params.stage_eps(3) == 0.125
    assert VtaParams(0.1, 0.6, 0.01, 2).m == 3


def test_arm_sets():
    """Arms are split by their bias relative to l1."""
    params = VtaParams(0.4, 0.6, 0.01, 3)
    sets = arm_sets(make_instance([0.6, 0.55, 0.4]), params)
    assert sets.s_right == {1}
    assert sets.s_mid == {2}
    assert sets.s_left == {3}
    assert sets.s_mr == {1, 2}
    assert sets.s_lm == {2, 3}


def test_single_good_arm():
    """A lone arm above l1 keeps its flag and never stops early."""
    params = VtaParams(0.4, 0.6, 0.01, 1)
    run = run_vta(make_instance([0.9]), params)
    assert run.profile.psucc >= 1 - 2 * params.alpha
    assert run.profile.w[-1] >= 1 - 2 * (2 * params.m * params.a) ** 2
    assert run.state.is_normalized()


def test_half_success():
    """One arm above and one below the gap: psucc is 1/2 up to alpha."""
    params = VtaParams(0.4, 0.6, 0.01, 2)
    run = run_vta(make_instance([0.9, 0.1]), params)
    assert run.profile.psucc_prime == 0.5
    assert abs(run.profile.psucc - 0.5) <= params.alpha
    marginal = success_marginal(run)
    assert marginal[1] == pytest.approx(1.0, abs=1e-6)


def test_all_below_gap():
    """Without arms at or above the gap the flag is almost always cleared."""
    params = VtaParams(0.4, 0.6, 0.01, 2)
    run = run_vta(make_instance([0.3, 0.2]), params)
    assert run.profile.psucc <= 2 * params.alpha / 2
    assert run.profile.psucc_prime == 0.0


def test_closed_form_counts_right_arms():
    """With no arm in the gap, p'succ is |S_>| / n."""
    params = VtaParams(0.4, 0.6, 0.01, 4)
    instance = make_instance([0.9, 0.3, 0.2, 0.1])
    run = run_vta(instance, params)
    assert psucc_closed_form(instance, params, run.state) == 0.25


def test_success_sandwich_with_gap_arm():
    """An arm inside the gap is counted with its exact flag mass."""
    params = VtaParams(0.4, 0.6, 0.01, 3)
    instance = make_instance([0.7, 0.53, 0.2])
    run = run_vta(instance, params)
    per_arm = flag_mass_by_arm(run.state)
    assert run.profile.psucc_prime == pytest.approx((1 + per_arm[2]) / 3)
    assert abs(run.profile.psucc - run.profile.psucc_prime) <= 2 * params.alpha / 3


def test_stopping_times():
    """Stopping times increase strictly and the termination step is free."""
    params = VtaParams(0.4, 0.6, 0.01, 2)
    configs = stage_configs(params)
    t = stopping_times(configs)
    assert len(t) == params.m + 1
    assert t[0] == 1 + aest_query_cost(configs[0])
    assert all(a < b for a, b in zip(t[:-2], t[1:-1]))
    assert t[-1] == t[-2]


def test_profile_and_ledger():
    """The run is charged t_{m+1} raw calls and t_avg is the RMS stopping time."""
    params = VtaParams(0.4, 0.6, 0.01, 2)
    run = run_vta(make_instance([0.9, 0.1]), params)
    profile = stopping_profile(run)
    assert run.ledger.oracle_calls == profile.t_max
    assert run.ledger.breakdown["vta.init"] == 1
    assert sum(profile.w) == pytest.approx(1.0)
    assert profile.t_avg == pytest.approx(math.sqrt(sum(w * t ** 2 for w, t in zip(profile.w, profile.t))))
    assert profile.t_avg <= profile.t_max


def test_config_override():
    """Explicit stage configs replace the default grids and must match m."""
    params = VtaParams(0.1, 0.6, 0.01, 2)
    configs = [QpeConfig(8, 1)] * params.m
    run = run_vta(make_instance([0.9, 0.1]), params, configs=configs)
    assert run.profile.t_max == 1 + 3 * aest_query_cost(QpeConfig(8, 1))
    with pytest.raises(ParameterError):
        run_vta(make_instance([0.9, 0.1]), params, configs=configs[:2])


def test_arm_count_must_match():
    """Params built for another arm count are refused."""
    with pytest.raises(ParameterError):
        run_vta(make_instance([0.9, 0.1]), VtaParams(0.4, 0.6, 0.01, 3))


def test_stopping_time_scalings():
    """The reference scalings follow the set sizes and gaps."""
    params = VtaParams(0.4, 0.6, 0.01, 1)
    t_max, t_avg_sq = stopping_time_scalings(make_instance([0.9]), params)
    log_a = math.log2(1 / params.a)
    assert t_max == pytest.approx(log_a / params.delta)
    assert t_avg_sq == pytest.approx(log_a ** 2 / params.delta ** 2)


# t_{m+1} sits between these multiples of log2(1/a)/Delta, and t_avg^2 below
# T_AVG_FACTOR times its reference scaling, on every instance and threshold pair
T_MAX_FACTORS = (100.0, 2.0e4)
T_AVG_FACTOR = 2.0e8


def test_stopping_times_follow_their_scalings(rng):
    """One pair of constants bounds both stopping times across random runs."""
    for _ in range(20):
        n = int(rng.integers(1, 9))
        instance = make_instance(rng.uniform(0.05, 0.95, n).tolist())
        gap = float(math.exp(rng.uniform(math.log(2.0 ** -6), math.log(0.3))))
        l2 = float(rng.uniform(0.01, 0.99 - gap))
        alpha = float(math.exp(rng.uniform(math.log(1e-3), math.log(0.1))))
        params = VtaParams(l2, l2 + gap, alpha, n)
        profile = run_vta(instance, params).profile
        t_max, t_avg_sq = stopping_time_scalings(instance, params)
        low, high = T_MAX_FACTORS
        assert low * t_max <= profile.t_max <= high * t_max
        assert profile.t_avg ** 2 <= T_AVG_FACTOR * t_avg_sq
