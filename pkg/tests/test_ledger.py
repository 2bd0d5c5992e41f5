"""Tests for query accounting."""

import math

import pytest

from qbai.errors import BudgetExceededError, ParameterError
from qbai.ledger import QueryLedger


def test_charge_accumulates():
    """Charges add up per name and in total."""
    ledger = QueryLedger()
    ledger.charge("vta.init", 1)
    ledger.charge("estimate", 10, 250.0)
    ledger.charge("estimate", 5, 50.0)
    assert ledger.oracle_calls == 16
    assert ledger.modeled_cost == 300.0
    assert ledger.breakdown == {"vta.init": 1, "estimate": 15}
    assert ledger.modeled_breakdown == {"estimate": 300.0}
    assert ledger.is_consistent()


def test_negative_charge_rejected():
    """Ledgers only grow."""
    with pytest.raises(ParameterError):
        QueryLedger().charge("x", -1)
    with pytest.raises(ParameterError):
        QueryLedger().charge("x", 0, -2.0)


def test_cap_raises_after_recording():
    """Crossing the cap raises, with the charge already on the books."""
    ledger = QueryLedger(cap=100.0)
    ledger.charge("estimate", 3, 60.0)
    with pytest.raises(BudgetExceededError):
        ledger.charge("estimate", 3, 60.0)
    assert ledger.modeled_cost == 120.0
    assert ledger.oracle_calls == 6


def test_merge_commutes():
    """merge is commutative and leaves its inputs alone."""
    a = QueryLedger()
    a.charge("amplify", 7, 10.0)
    b = QueryLedger()
    b.charge("estimate", 3, math.inf)
    b.charge("vta.init", 1)
    ab, ba = a.merge(b), b.merge(a)
    assert ab.oracle_calls == ba.oracle_calls == 11
    assert ab.breakdown == ba.breakdown
    assert ab.modeled_breakdown == ba.modeled_breakdown
    assert a.oracle_calls == 7


def test_absorb_respects_cap():
    """Absorbing a ledger into a capped one can trip the cap."""
    spent = QueryLedger()
    spent.charge("estimate", 1, 500.0)
    capped = QueryLedger(cap=100.0)
    with pytest.raises(BudgetExceededError):
        capped.absorb(spent)
