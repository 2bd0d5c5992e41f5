"""Tests for random streams and Monte Carlo helpers."""

import math

import pytest

from qbai.montecarlo import binomial_ci, sigma, success_floor
from qbai.streams import NAIVE_STREAM, QUANTUM_STREAM, SE_STREAM, trial_rng


def test_same_key_same_stream():
    """A key always gives the same draws."""
    assert trial_rng(7, 1, 2).random(5).tolist() == trial_rng(7, 1, 2).random(5).tolist()


def test_keys_are_independent():
    """Different counters or seeds give different draws."""
    base = trial_rng(7, 0, 0, QUANTUM_STREAM).random(4).tolist()
    assert trial_rng(7, 0, 0, SE_STREAM).random(4).tolist() != base
    assert trial_rng(7, 0, 1, QUANTUM_STREAM).random(4).tolist() != base
    assert trial_rng(8, 0, 0, QUANTUM_STREAM).random(4).tolist() != base
    assert len({QUANTUM_STREAM, SE_STREAM, NAIVE_STREAM}) == 3


def test_sigma_and_floor():
    """The floor sits three binomial deviations below the target."""
    assert sigma(0.5, 100) == pytest.approx(0.05)
    assert success_floor(0.95, 400) == pytest.approx(0.95 - 3 * math.sqrt(0.95 * 0.05 / 400))


def test_binomial_ci():
    """The interval holds the empirical rate and narrows with more trials."""
    low, high = binomial_ci(90, 100)
    assert low < 0.9 < high
    wide_low, wide_high = binomial_ci(9, 10)
    assert wide_high - wide_low > high - low
    assert binomial_ci(10, 10)[1] == pytest.approx(1.0)
