"""Tests for the validation suites."""

import json

import pytest

from qbai import amp_est, vta
from qbai.errors import ParameterError
from qbai.validate import (
    backend_cases,
    backend_suite,
    gae_suite,
    overlap_suite,
    run_suites,
    shrink_suite,
    success_suite,
    summary,
)


@pytest.fixture
def flipped_stop_bit(monkeypatch):
    """GAE with its stop comparison reversed."""
    amp_est._gae.cache_clear()
    vta._execute.cache_clear()
    monkeypatch.setattr(amp_est, "_stops", lambda estimates, threshold: estimates >= threshold)
    yield
    amp_est._gae.cache_clear()
    vta._execute.cache_clear()


def test_small_suites_pass():
    """Small case counts of every cheap suite pass."""
    for result in (gae_suite(200, 1), success_suite(5, 1), overlap_suite(2000, 1)):
        assert result.passed, result.failures
        assert result.checked > 0
        assert result.violations == 0


def test_shrink_suite_small():
    """Locate on two instances keeps its guarantees."""
    result = shrink_suite(2, 10, 3)
    assert result.passed, result.failures
    assert result.checked == 20


def test_gae_suite_catches_flipped_stop_bit(flipped_stop_bit):
    """A reversed threshold comparison is reported."""
    result = gae_suite(100, 1)
    assert not result.passed
    assert result.violations > 0
    assert 0 < len(result.failures) <= 5


def test_invalid_level():
    """Only quick and full exist."""
    with pytest.raises(ParameterError):
        run_suites("medium")


def test_summary_is_json():
    """The summary serializes and names failed suites."""
    good = overlap_suite(10, 2)
    bad = overlap_suite(10, 2)
    bad.name = "broken"
    bad.fail("forced")
    data = json.loads(json.dumps(summary([good, bad], "quick")))
    assert data["passed"] is False
    assert data["failed_suites"] == ["broken"]
    assert data["suites"][1]["failures"] == ["forced"]


def test_backend_cases_fit():
    """Twenty-one configurations, three to four stages each."""
    cases = backend_cases(0)
    assert len(cases) == 21
    assert all(len(bits) in (3, 4) for _, _, _, bits in cases)


@pytest.mark.slow
def test_backend_suite():
    """Gate-level and branch laws agree on every configuration."""
    result = backend_suite(0)
    assert result.passed, result.failures
    assert result.checked == 21
