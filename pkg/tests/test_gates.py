"""Tests for the gate-level reference simulator."""

import numpy as np
import pytest

from qbai.amp_est import QpeConfig
from qbai.branch import project_flag, total_variation
from qbai.errors import ParameterError, QubitBudgetError
from qbai.gates import GateState, inverse_qft, ry, uniform_preparation, gate_level_run
from qbai.oracle import make_instance
from qbai.vta import VtaParams, run_vta


def branch_run(instance, l2, l1, alpha, bits):
    configs = [QpeConfig(2 ** b, 1) for b in bits]
    return run_vta(instance, VtaParams(l2, l1, alpha, instance.n), configs=configs)


def test_building_blocks_unitary():
    """The dense blocks are unitary and prepare what they claim."""
    for m_points in (2, 8):
        f = inverse_qft(m_points)
        assert np.allclose(f @ f.conj().T, np.eye(m_points))
    u = uniform_preparation(3, 4)
    assert np.allclose(u @ u.T, np.eye(4))
    assert np.allclose(u[:, 0], [3 ** -0.5] * 3 + [0.0])
    assert np.allclose(ry(np.pi) @ [1.0, 0.0], [0.0, 1.0])


def test_controlled_apply():
    """A controlled X flips the target only on the control subspace."""
    state = GateState(2)
    state.apply(np.array([[0.0, 1.0], [1.0, 0.0]]), [0])
    state.apply(np.array([[0.0, 1.0], [1.0, 0.0]]), [1], [(0, 1)])
    assert state.probabilities()[1, 1] == pytest.approx(1.0)
    with pytest.raises(ParameterError):
        state.apply(np.eye(2), [0], [(0, 1)])


@pytest.mark.parametrize("p, l2, l1, bits", [
    ((0.9, 0.1), 0.1, 0.6, (3, 3, 3)),
    ((0.7, 0.55, 0.2), 0.25, 0.8, (2, 3, 2)),
    ((0.45, 0.8, 0.3, 0.62), 0.3, 0.65, (2, 2, 2, 2)),
])
def test_backends_agree(p, l2, l1, bits):
    """Gate-by-gate and branch executions give the same (arm, clock, flag) law."""
    instance = make_instance(p)
    gate_state = gate_level_run(instance, l2, l1, 0.05, bits)
    run = branch_run(instance, l2, l1, 0.05, bits)
    assert gate_state.norm_squared() == pytest.approx(1.0, abs=1e-10)
    assert total_variation(gate_state.outcome_distribution(), run.state.outcome_distribution()) <= 1e-9
    _, mass = project_flag(run.state, 1)
    assert gate_state.flag_marginal() == pytest.approx(mass, abs=1e-9)


def test_half_flag_probability():
    """One arm above l1 and one far below: the flag reads 1 about half the time."""
    gate_state = gate_level_run(make_instance([0.9, 0.1]), 0.1, 0.6, 0.05, (3, 3, 3))
    assert abs(gate_state.flag_marginal() - 0.5) < 0.1


def test_single_good_arm_keeps_flag():
    """A lone arm above l1 keeps the flag."""
    gate_state = gate_level_run(make_instance([0.9]), 0.1, 0.6, 0.05, (3, 3, 3))
    assert gate_state.flag_marginal() > 0.95


def test_gate_ledger():
    """Each stage is charged one single-run phase estimation."""
    gate_state = gate_level_run(make_instance([0.9, 0.1]), 0.1, 0.6, 0.05, (2, 3, 2))
    assert gate_state.ledger.breakdown == {
        "gate.init": 1, "gate.stage.1": 6, "gate.stage.2": 14, "gate.stage.3": 6,
    }


def test_qubit_budget_names_register():
    """Exceeding the qubit budget names the register that did not fit."""
    with pytest.raises(QubitBudgetError) as info:
        gate_level_run(make_instance([0.9, 0.1]), 0.1, 0.6, 0.05, (10, 10, 10))
    assert info.value.register == "P3"


def test_register_count_must_match_stages():
    """One phase register per stage."""
    with pytest.raises(ParameterError):
        gate_level_run(make_instance([0.9, 0.1]), 0.1, 0.6, 0.05, (3, 3))
