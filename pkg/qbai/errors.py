"""Exception hierarchy of the simulator.

Library code raises these; only ``main.py`` turns them into exit codes.
"""

from __future__ import annotations


class QbaiError(Exception):
    """Base class of every error raised by :mod:`qbai`."""


class InstanceError(QbaiError, ValueError):
    """A bandit instance violates its invariants."""


class ParameterError(QbaiError, ValueError):
    """An algorithm parameter is out of range."""


class ConfigError(QbaiError):
    """A config file, environment variable or flag value is unusable."""


class QubitBudgetError(QbaiError):
    """The gate-level simulator would exceed its qubit budget."""

    def __init__(self, register: str, needed: int, available: int) -> None:
        super().__init__(
            f"register {register} needs {needed} qubits but only "
            f"{available} remain in the gate-level budget"
        )
        self.register = register


class EmptySuccessError(QbaiError):
    """The flag-1 subspace of a variable-time run has zero mass."""


class SeparationError(QbaiError):
    """Locate hit its round cap without separating the two intervals.

    ``ledger`` holds the queries spent before the breaker tripped.
    """

    def __init__(self, message: str, ledger=None) -> None:
        super().__init__(message)
        self.ledger = ledger


class BudgetExceededError(QbaiError):
    """A budget-capped run spent more than its modeled-cost budget."""


class BudgetTooSmallError(QbaiError):
    """A fixed budget is below every entry of the Tc table."""


class NoDecisionError(QbaiError):
    """The fixed-budget majority vote was won by the abstention symbol."""


class BoundMismatchError(QbaiError):
    """A lower bound was compared with a run on a different instance."""
