"""Tests for the classical baselines."""

import numpy as np
import pytest

from qbai.classical import Elimination, naive, naive_pulls, radius, successive_elimination
from qbai.errors import ParameterError
from qbai.montecarlo import success_floor
from qbai.oracle import make_instance
from qbai.streams import trial_rng


def test_naive_pulls():
    """ceil(8 / Delta^2 ln(2n / delta)) pulls per arm."""
    assert naive_pulls(2, 0.5, 0.1) == 119


def test_naive_finds_best(rng):
    """Uniform sampling with an easy gap picks the best arm."""
    arm, pulls = naive(make_instance([0.9, 0.1]), 0.5, 0.1, rng)
    assert arm == 1
    assert pulls == 238


def test_naive_ranges(rng):
    """The known gap must be positive and delta in (0, 1)."""
    instance = make_instance([0.9, 0.1])
    with pytest.raises(ParameterError):
        naive(instance, 0.0, 0.1, rng)
    with pytest.raises(ParameterError):
        naive(instance, 0.5, 1.0, rng)


def test_radius_decreasing():
    """The confidence radius shrinks with the pull count."""
    r = radius(4, np.arange(1, 200), 0.05)
    assert np.all(np.diff(r) < 0)


def test_successive_elimination_single_arm(rng):
    """One arm is returned without pulls."""
    assert successive_elimination(make_instance([0.3]), 0.05, rng) == (1, 0)


def test_successive_elimination_trace(rng):
    """Every arm but the winner is eliminated exactly once."""
    instance = make_instance([0.2, 0.9, 0.5, 0.1])
    trace = []
    arm, pulls = successive_elimination(instance, 0.05, rng, trace=trace)
    assert arm == 2
    assert sorted(e.arm for e in trace) == [1, 3, 4]
    assert all(isinstance(e, Elimination) for e in trace)
    assert all(e.leader_mean - e.mean >= 2 * e.radius for e in trace)
    rounds = [e.round for e in trace]
    assert rounds == sorted(rounds)
    assert pulls >= 4 * rounds[0]


def test_successive_elimination_success_rate():
    """The best arm comes back in at least a 1 - delta fraction of trials."""
    instance = make_instance([0.7, 0.5, 0.45])
    trials = 100
    hits = sum(successive_elimination(instance, 0.1, trial_rng(5, t))[0] == 1 for t in range(trials))
    assert hits / trials >= success_floor(0.9, trials)


def test_successive_elimination_deterministic():
    """The same stream gives the same answer and pull count."""
    instance = make_instance([0.6, 0.5, 0.3])
    first = successive_elimination(instance, 0.05, trial_rng(9, 0))
    second = successive_elimination(instance, 0.05, trial_rng(9, 0))
    assert first == second


def test_successive_elimination_ranges(rng):
    """delta lies in (0, 1)."""
    with pytest.raises(ParameterError):
        successive_elimination(make_instance([0.9, 0.1]), 0.0, rng)
