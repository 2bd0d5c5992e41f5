"""Oracle-query accounting.

A :class:`QueryLedger` tracks two separate quantities:

* ``oracle_calls`` - raw invocations of the bandit oracle (or its
  inverse) in the circuits the simulator actually executed, split by
  subroutine in ``breakdown``;
* ``modeled_cost`` - the variable-time cost the amplification and
  estimation subroutines are charged under their cost formulas.

Ledgers only grow.  Trials keep their own ledger; ledgers of
independent pieces are combined with :meth:`QueryLedger.merge`, which is
associative and commutative.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Optional

from .errors import BudgetExceededError, ParameterError

LOGGER = logging.getLogger(__name__)


@dataclass
class QueryLedger:
    """Running totals of raw oracle calls and modeled cost.

    When ``cap`` is set, a charge that pushes ``modeled_cost`` above it
    raises :class:`~qbai.errors.BudgetExceededError` after being recorded.
    """

    oracle_calls: int = 0
    modeled_cost: float = 0.0
    breakdown: Dict[str, int] = field(default_factory=dict)
    modeled_breakdown: Dict[str, float] = field(default_factory=dict)
    cap: Optional[float] = None

    def charge(self, name: str, calls: int = 0, modeled: float = 0.0) -> None:
        """Record ``calls`` raw oracle calls and ``modeled`` cost under ``name``."""
        if calls < 0 or modeled < 0 or math.isnan(modeled):
            raise ParameterError(f"negative charge {calls}/{modeled} for {name}")
        self.oracle_calls += int(calls)
        self.breakdown[name] = self.breakdown.get(name, 0) + int(calls)
        if modeled:
            self.modeled_cost += modeled
            self.modeled_breakdown[name] = self.modeled_breakdown.get(name, 0.0) + modeled
        if self.cap is not None and self.modeled_cost > self.cap:
            LOGGER.debug("budget %g exceeded by %s (%g)", self.cap, name, self.modeled_cost)
            raise BudgetExceededError(
                f"modeled cost {self.modeled_cost:g} exceeds budget {self.cap:g}"
            )

    def absorb(self, other: "QueryLedger") -> None:
        """Add every entry of ``other`` into this ledger (cap is checked)."""
        for name, calls in other.breakdown.items():
            self.charge(name, calls, other.modeled_breakdown.get(name, 0.0))
        for name, modeled in other.modeled_breakdown.items():
            if name not in other.breakdown:
                self.charge(name, 0, modeled)

    def merge(self, other: "QueryLedger") -> "QueryLedger":
        """Return a new uncapped ledger holding the sum of both ledgers."""
        merged = QueryLedger()
        merged.absorb(self)
        merged.absorb(other)
        return merged

    def is_consistent(self) -> bool:
        """Return True if the breakdown sums to ``oracle_calls``."""
        return sum(self.breakdown.values()) == self.oracle_calls
