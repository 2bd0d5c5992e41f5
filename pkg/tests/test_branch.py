"""Tests for the branch-structured state backend."""

import math

import numpy as np
import pytest

from qbai.amplitude import Amplitude
from qbai.branch import BranchComponent, BranchState, inner_product, project_flag, total_variation
from qbai.errors import ParameterError
from qbai.oracle import make_instance
from qbai.vta import VtaParams, run_vta


def state(*rows, n_arms=2):
    return BranchState.from_components(
        [BranchComponent(a, c, g, f, Amplitude(complex(z))) for a, c, g, f, z in rows], n_arms
    )


def test_project_all_flags_set():
    """Projecting onto the flag every component carries is the identity."""
    psi = state((1, 1, 3, 1, math.sqrt(0.5)), (2, 2, 5, 1, math.sqrt(0.5)))
    projected, mass = project_flag(psi, 1)
    assert mass == pytest.approx(1.0)
    assert np.allclose(projected.amp, psi.amp)


def test_project_orthogonal_flag():
    """Projecting onto an absent flag gives the empty state."""
    psi = state((1, 1, 3, 0, 1.0))
    projected, mass = project_flag(psi, 1)
    assert mass == 0.0
    assert len(projected) == 0


def test_project_born_rule():
    """The squared norm of the projection is the Born weight."""
    psi = state((1, 4, 8, 1, math.sqrt(0.3)), (1, 2, 5, 0, math.sqrt(0.7)))
    projected, mass = project_flag(psi, 1)
    assert mass == pytest.approx(0.3)
    assert projected.is_normalized()


def test_inner_products():
    """Norms, orthogonality and projections."""
    theta = 0.3
    a = state((1, 1, 3, 1, math.cos(theta)), (2, 1, 3, 1, math.sin(theta)))
    x = state((1, 1, 3, 1, 1.0))
    y = state((1, 2, 3, 1, 1.0))
    assert inner_product(a, a).isclose(1.0)
    assert inner_product(x, y).isclose(0.0)
    assert inner_product(a, x).isclose(math.cos(theta))


def test_inner_product_conjugates_bra():
    """The bra is conjugated."""
    a = state((1, 1, 1, 1, 1j))
    b = state((1, 1, 1, 1, 1.0))
    assert inner_product(a, b).isclose(-1j)


def test_inner_product_arm_count_mismatch():
    """States over different arm counts cannot be compared."""
    with pytest.raises(ParameterError):
        inner_product(state((1, 1, 1, 1, 1.0)), state((1, 1, 1, 1, 1.0), n_arms=3))


def test_columns_read_only():
    """The label and amplitude columns cannot be written."""
    psi = state((1, 1, 3, 1, 1.0))
    with pytest.raises(ValueError):
        psi.amp[0] = 0.5


def test_masses():
    """Arm and clock masses add up the Born weights."""
    psi = state(
        (1, 1, 3, 0, math.sqrt(0.2)),
        (1, 3, 4, 1, math.sqrt(0.3)),
        (2, 3, 4, 1, math.sqrt(0.5)),
    )
    masses = psi.arm_masses()
    assert masses[1] == pytest.approx(0.5)
    assert masses[2] == pytest.approx(0.5)
    assert np.allclose(psi.clock_masses(3), [0.2, 0.0, 0.8])
    outcome = psi.outcome_distribution()
    assert outcome[(2, 3, 1)] == pytest.approx(0.5)
    assert sum(outcome.values()) == pytest.approx(1.0)


def test_components_round_trip():
    """components lists the rows the state was built from."""
    psi = state((1, 2, 5, 0, 0.6), (2, 3, 4, 1, 0.8j))
    rows = psi.components
    assert [(c.arm, c.clock, c.garbage, c.flag) for c in rows] == [(1, 2, 5, 0), (2, 3, 4, 1)]
    assert rows[1].amp == Amplitude(0.0, 0.8)


def test_total_variation():
    """Half the L1 distance, with missing keys counted as zero."""
    assert total_variation({"a": 0.5, "b": 0.5}, {"a": 0.5, "b": 0.5}) == 0.0
    assert total_variation({"a": 1.0}, {"b": 1.0}) == pytest.approx(1.0)
    assert total_variation({"a": 0.7, "b": 0.3}, {"a": 0.5, "b": 0.5}) == pytest.approx(0.2)


def test_mismatched_columns():
    """Columns must have one entry per component."""
    with pytest.raises(ParameterError):
        BranchState([1, 2], [1], [1], [1], [1.0], 2)


def test_stop_stages_of_a_real_run_are_orthogonal():
    """Components of one arm halting at different stages never overlap."""
    run = run_vta(make_instance([0.7, 0.5, 0.2]), VtaParams(0.4, 0.6, 0.01, 3))
    stopped = [c for c in run.state.components if c.arm == 1 and c.flag == 0]
    assert len({c.clock for c in stopped}) >= 2
    first, second = stopped[0], stopped[1]
    assert first.clock != second.clock
    a = BranchState.from_components([first], 3)
    b = BranchState.from_components([second], 3)
    assert inner_product(a, b) == Amplitude(0.0, 0.0)
    assert inner_product(a, a).isclose(abs(complex(first.amp)) ** 2)


def test_flag_halves_of_a_real_run_are_orthogonal():
    """The flagged and unflagged parts of a run share no label."""
    run = run_vta(make_instance([0.7, 0.5, 0.2]), VtaParams(0.4, 0.6, 0.01, 3))
    good = run.state.select(run.state.flag == 1)
    bad = run.state.select(run.state.flag == 0)
    assert len(good) and len(bad)
    assert inner_product(good, bad) == Amplitude(0.0, 0.0)
