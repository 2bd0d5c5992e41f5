"""Numeric constants and small helper functions shared by the simulator.

The helpers here are the formulas that more than one module needs: the
phase-estimation kernel, the coin angle of a bias and the Bernoulli
relative entropy.  The tuning constants below are the defaults used by
the algorithms and the command line driver; every one of them can be
overridden per call.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import rel_entr

# Single-run success probability of phase estimation (mass within one
# grid step of the true angle).
SINGLE_RUN_SUCCESS = 8.0 / math.pi ** 2


def coin_angle(p: float) -> float:
    """Return the rotation angle ``theta = arcsin(sqrt(p))`` of a coin state.

    Values a hair outside ``[0, 1]`` caused by rounding are clipped.
    """
    return math.asin(math.sqrt(min(1.0, max(0.0, p))))


def fejer_kernel(d, m_points: int) -> np.ndarray:
    """Return ``sin^2(pi d) / (M^2 sin^2(pi d / M))`` elementwise.

    This is the probability that phase estimation on an ``M``-point grid
    reports the grid point at signed distance ``d`` from the true phase.
    The removable singularity at multiples of ``M`` evaluates to 1.
    """
    d = np.asarray(d, dtype=float)
    den = np.sin(np.pi * d / m_points)
    safe = np.abs(den) > 1e-12
    out = np.ones_like(d)
    out[safe] = np.sin(np.pi * d[safe]) ** 2 / (m_points * den[safe]) ** 2
    return out


def grid_estimates(m_points: int) -> np.ndarray:
    """Return the folded bias estimates ``sin^2(pi y / M)`` for ``y < M``.

    Outcomes ``y`` and ``M - y`` map to bit-identical estimates.
    """
    y = np.arange(m_points)
    return np.sin(np.pi * np.minimum(y, m_points - y) / m_points) ** 2


def kl_bernoulli(a: float, b: float) -> float:
    """Return the relative entropy ``D(a || b)`` between two Bernoulli laws."""
    return float(rel_entr(a, b) + rel_entr(1.0 - a, 1.0 - b))


def log53(x: float) -> float:
    """Logarithm to base 5/3, the per-round shrink factor of Locate."""
    return math.log(x) / math.log(5.0 / 3.0)


def locate_round_bound(delta2: float) -> int:
    """Return ``ceil(log_{5/3}(1/delta2)) + 3``, the Locate round bound."""
    return math.ceil(log53(1.0 / delta2)) + 3


def format_float(x: float) -> str:
    """Render a float the way every CSV and data file of the harness does."""
    return f"{x:.10g}"


# Simulation limits.

MAX_GATE_QUBITS = 26
NORM_TOL = 1e-10

# Algorithm defaults

ALPHA_FACTOR = 0.01       # alpha = ALPHA_FACTOR * delta for Amplify/Estimate
SHRINK_EPS = 0.1          # relative precision of the estimates inside Shrink
SHRINK_DIVISIONS = 5      # Shrink works on fifths of the interval
DELTA2_FLOOR = 2.0 ** -10
CIRCUIT_BREAKER_FACTOR = 4

# Command line defaults.

DEFAULT_DELTA = 0.05
DEFAULT_SEED = 7
DEFAULT_TRIALS = 1
DEFAULT_P_FLOOR = 0.1
DEFAULT_BEST_BIAS = 0.6
DEFAULT_GAMMA = 2.0
THREADS_ENV = "QBAI_THREADS"

CSV_HEADER = (
    "instance_id",
    "n",
    "H",
    "delta2",
    "delta",
    "modeled_quantum_cost",
    "raw_oracle_calls",
    "classical_se_pulls",
    "classical_naive_pulls",
    "lower_bound",
    "success",
    "seed",
)
