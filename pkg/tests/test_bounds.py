"""Tests for the adversary lower bound."""

import math

import pytest

from qbai.bai import best_arm
from qbai.bounds import (
    adversary_bound,
    bound_vs_model,
    check_overlap_inequality,
    hard_family,
    overlap,
)
from qbai.errors import BoundMismatchError, InstanceError, ParameterError
from qbai.ledger import QueryLedger
from qbai.oracle import make_instance


def test_adversary_bound_value():
    """Two arms at 0.6 and 0.4 with p = 1/4 and delta = 0.05."""
    bound = adversary_bound(make_instance([0.6, 0.4]), 0.05, 0.25)
    eta = 0.25 * 0.2 / 2
    success = 1 - 2 * math.sqrt(0.05 * 0.95)
    expected = success / (1 + 2 / overlap(0.25 - eta)) / (0.2 + eta)
    assert bound.intermediate == pytest.approx(expected)
    assert bound.intermediate == pytest.approx(0.7385, abs=1e-3)
    assert 0 < bound.simplified <= bound.intermediate


def test_bound_vanishes_near_half():
    """delta close to 1/2 leaves almost nothing to distinguish."""
    bound = adversary_bound(make_instance([0.6, 0.4]), 0.49, 0.25)
    assert bound.intermediate < 0.01


def test_bound_grows_with_arms():
    """Adding suboptimal arms raises the bound like sqrt(H)."""
    small = adversary_bound(make_instance([0.6, 0.4]), 0.05, 0.25).intermediate
    large = adversary_bound(make_instance([0.6] + [0.4] * 4), 0.05, 0.25).intermediate
    assert large == pytest.approx(2 * small)


def test_bound_ranges():
    """The floor lies in (0, 1/2) and every bias in [p, 1 - p]."""
    with pytest.raises(ParameterError):
        adversary_bound(make_instance([0.6, 0.4]), 0.05, 0.6)
    with pytest.raises(InstanceError):
        adversary_bound(make_instance([0.95, 0.4]), 0.05, 0.1)
    with pytest.raises(ParameterError):
        adversary_bound(make_instance([0.6, 0.4]), 0.5, 0.25)


def test_hard_family():
    """Variant x makes arm x the unique best by eta."""
    instance = make_instance([0.6, 0.4, 0.3])
    family = hard_family(instance, 0.2)
    assert family.eta == pytest.approx(0.02)
    assert family.variants[0] is instance
    for index, variant in zip(instance.indices, family.variants):
        assert variant.best == index
    assert family.variants[2].bias(3) == pytest.approx(0.62)


def test_overlap_inequality():
    """The overlap of two coins is bounded by their bias difference."""
    for p1, p2 in ((0.3, 0.35), (0.2, 0.8), (0.5, 0.5), (0.11, 0.12)):
        lhs, rhs, holds = check_overlap_inequality(p1, p2, 0.1)
        assert holds and lhs <= rhs + 1e-12
    lhs, rhs, _ = check_overlap_inequality(0.3, 0.3, 0.1)
    assert lhs == rhs == 0.0
    with pytest.raises(ParameterError):
        check_overlap_inequality(0.05, 0.3, 0.1)


def test_bound_vs_model(rng):
    """The lower bound sits below the modeled cost of a real run."""
    instance = make_instance([0.6, 0.4])
    result = best_arm(instance, 0.05, rng)
    report = bound_vs_model(instance, 0.05, 0.25, result)
    assert report.holds
    assert report.ratio >= 1.0
    assert report.modeled_cost == result.ledger.modeled_cost


def test_bound_vs_model_instance_mismatch(rng):
    """A run on another instance cannot be compared."""
    result = best_arm(make_instance([0.7, 0.3]), 0.05, rng)
    with pytest.raises(BoundMismatchError):
        bound_vs_model(make_instance([0.6, 0.4]), 0.05, 0.25, result)


def test_bound_ignores_arm_order(rng):
    """Relabelling the arms leaves the bound unchanged."""
    for _ in range(10):
        instance = make_instance(rng.uniform(0.25, 0.75, int(rng.integers(2, 9))).tolist())
        bound = adversary_bound(instance, 0.05, 0.25)
        moved = adversary_bound(instance.permuted(rng.permutation(instance.n).tolist()), 0.05, 0.25)
        assert moved.intermediate == pytest.approx(bound.intermediate)
        assert moved.simplified == pytest.approx(bound.simplified)


def test_bound_nonincreasing_in_delta():
    """Allowing more error never raises the bound."""
    instance = make_instance([0.7, 0.55, 0.5, 0.3])
    values = [adversary_bound(instance, d, 0.25) for d in (0.001, 0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.49)]
    for before, after in zip(values, values[1:]):
        assert after.intermediate <= before.intermediate
        assert after.simplified <= before.simplified


def test_bound_vs_model_from_a_ledger():
    """A run that gave up is compared through its ledger alone."""
    instance = make_instance([0.6, 0.4])
    ledger = QueryLedger()
    ledger.charge("locate", 10, 100.0)
    report = bound_vs_model(instance, 0.05, 0.25, ledger=ledger)
    assert report.modeled_cost == 100.0
    assert report.holds
    assert report.ratio == pytest.approx(100.0 / report.lower_bound)
    assert not bound_vs_model(instance, 0.05, 0.25, ledger=QueryLedger()).holds


def test_bound_vs_model_needs_one_source(rng):
    instance = make_instance([0.6, 0.4])
    with pytest.raises(ParameterError):
        bound_vs_model(instance, 0.05, 0.25)
    result = best_arm(instance, 0.05, rng)
    with pytest.raises(ParameterError):
        bound_vs_model(instance, 0.05, 0.25, result, ledger=result.ledger)
