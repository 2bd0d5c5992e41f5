"""Gate-by-gate reference execution of the variable-time algorithm.

This is a small dense statevector simulator used only to validate the
branch backend.  Qubits are allocated in registers, in this order:

* ``I`` - arm register, ``max(1, ceil(log2 n))`` qubits;
* ``B`` - the coin qubit;
* ``C`` - ``m + 1`` clock qubits, one per stage plus the termination slot;
* ``P1..Pm`` - phase-estimation registers of the requested widths;
* ``F`` - the flag.

The state lives in a tensor of shape ``[2] * N`` with axis ``q`` holding
qubit ``q``.  A gate on ``k`` target qubits with a set of classical
controls is applied by fixing the control axes, contracting the target
axes with the ``2^k x 2^k`` matrix and writing the slice back.  Target
lists are given most significant qubit first, so a register listed as
``reg[::-1]`` is addressed by its integer value.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .amp_est import QpeConfig, aest_query_cost
from .constants import MAX_GATE_QUBITS, coin_angle, grid_estimates
from .errors import ParameterError, QubitBudgetError
from .ledger import QueryLedger
from .oracle import BanditInstance
from .vta import VtaParams

LOGGER = logging.getLogger(__name__)

HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)
PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]])

Control = Tuple[int, int]


def ry(angle: float) -> np.ndarray:
    """Single-qubit ``R_y(angle)``."""
    c, s = math.cos(angle / 2.0), math.sin(angle / 2.0)
    return np.array([[c, -s], [s, c]])


def inverse_qft(m_points: int) -> np.ndarray:
    """Dense inverse Fourier transform ``F[y, x] = exp(-2 pi i x y / M) / sqrt(M)``."""
    y, x = np.meshgrid(np.arange(m_points), np.arange(m_points), indexing="ij")
    return np.exp(-2j * np.pi * x * y / m_points) / math.sqrt(m_points)


def uniform_preparation(n: int, dim: int) -> np.ndarray:
    """Householder reflection taking ``|0>`` to the uniform state on ``n`` of ``dim`` levels."""
    target = np.zeros(dim)
    target[:n] = 1.0 / math.sqrt(n)
    v = np.zeros(dim)
    v[0] = 1.0
    v -= target
    norm = float(v @ v)
    if norm < 1e-30:
        return np.eye(dim)
    return np.eye(dim) - 2.0 * np.outer(v, v) / norm


@dataclass
class GateState:
    """Dense statevector over named qubit registers."""

    n_qubits: int
    registers: Dict[str, Tuple[int, ...]] = field(default_factory=dict)
    ledger: QueryLedger = field(default_factory=QueryLedger)
    arm_indices: Tuple[int, ...] = ()
    tensor: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.tensor = np.zeros([2] * self.n_qubits, dtype=np.complex128)
        self.tensor[(0,) * self.n_qubits] = 1.0

    @property
    def vector(self) -> np.ndarray:
        return self.tensor.reshape(-1)

    def apply(self, matrix: np.ndarray, targets: Sequence[int],
              controls: Sequence[Control] = ()) -> None:
        """Apply ``matrix`` to ``targets`` on the subspace selected by ``controls``."""
        control_qubits = {q for q, _ in controls}
        if control_qubits & set(targets):
            raise ParameterError("a qubit cannot be both control and target")
        index: List[object] = [slice(None)] * self.n_qubits
        for qubit, value in controls:
            index[qubit] = value
        remaining = [q for q in range(self.n_qubits) if q not in control_qubits]
        axes = [remaining.index(t) for t in targets]
        k = len(targets)
        gate = np.asarray(matrix, dtype=np.complex128).reshape([2] * (2 * k))
        block = self.tensor[tuple(index)]
        out = np.tensordot(gate, block, axes=(list(range(k, 2 * k)), axes))
        self.tensor[tuple(index)] = np.moveaxis(out, list(range(k)), axes)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.tensor) ** 2

    def norm_squared(self) -> float:
        return float(np.sum(self.probabilities()))

    def outcome_distribution(self) -> Dict[Tuple[int, int, int], float]:
        """Joint law of (arm index, clock slot, flag), summed over the rest."""
        probs = self.probabilities()
        coords = np.nonzero(probs)
        weights = probs[coords]
        arm_value = np.zeros(len(weights), dtype=np.int64)
        for k, qubit in enumerate(self.registers["I"]):
            arm_value += coords[qubit].astype(np.int64) << k
        clock_bits = np.stack([coords[q] for q in self.registers["C"]], axis=1)
        clock = np.where(clock_bits.any(axis=1), clock_bits.argmax(axis=1) + 1, 0)
        flag = coords[self.registers["F"][0]]
        out: Dict[Tuple[int, int, int], float] = {}
        for v, c, f, w in zip(arm_value, clock, flag, weights):
            key = (self.arm_indices[int(v)], int(c), int(f))
            out[key] = out.get(key, 0.0) + float(w)
        return out

    def flag_marginal(self) -> float:
        """Probability of reading ``F = 1``."""
        return sum(w for (_, _, f), w in self.outcome_distribution().items() if f == 1)


def _allocate(widths: Sequence[Tuple[str, int]]) -> Tuple[int, Dict[str, Tuple[int, ...]]]:
    registers: Dict[str, Tuple[int, ...]] = {}
    used = 0
    for name, width in widths:
        if used + width > MAX_GATE_QUBITS:
            raise QubitBudgetError(name, width, MAX_GATE_QUBITS - used)
        registers[name] = tuple(range(used, used + width))
        used += width
    return used, registers


def gate_level_run(instance: BanditInstance, l2: float, l1: float, alpha: float,
                   phase_bits: Sequence[int]) -> GateState:
    """Run the variable-time algorithm gate by gate with explicit phase registers.

    ``phase_bits[j-1]`` is the width of the stage-``j`` phase register;
    there must be one width per stage.  Each stage performs a single
    phase estimation (no median repetitions), matching a branch run with
    ``configs = [QpeConfig(2**b, 1) for b in phase_bits]``.
    """
    params = VtaParams(l2, l1, alpha, instance.n)
    m = params.m
    if len(phase_bits) != m:
        raise ParameterError(f"{m} stages need {m} phase registers, got {len(phase_bits)}")
    if any(b < 1 for b in phase_bits):
        raise ParameterError("phase registers need at least one qubit")
    arm_width = max(1, math.ceil(math.log2(instance.n)))
    layout = [("I", arm_width), ("B", 1), ("C", m + 1)]
    layout += [(f"P{j}", b) for j, b in enumerate(phase_bits, start=1)]
    layout.append(("F", 1))
    n_qubits, registers = _allocate(layout)
    state = GateState(n_qubits, registers, arm_indices=instance.indices)
    LOGGER.debug("gate-level run on %d qubits: %s", n_qubits, registers)

    arm_reg = registers["I"]
    coin = registers["B"][0]
    clock = registers["C"]
    flag = registers["F"][0]

    def arm_controls(v: int) -> List[Control]:
        return [(q, (v >> k) & 1) for k, q in enumerate(arm_reg)]

    state.apply(uniform_preparation(instance.n, 2 ** arm_width), arm_reg[::-1])
    for v, p in enumerate(instance.p):
        state.apply(ry(2.0 * coin_angle(p)), [coin], arm_controls(v))
    state.ledger.charge("gate.init", 1)
    state.apply(PAULI_X, [flag])

    for j, bits in enumerate(phase_bits, start=1):
        eps = params.stage_eps(j)
        m_points = 2 ** bits
        phase = registers[f"P{j}"]
        running = [(clock[k], 0) for k in range(j - 1)]
        for q in phase:
            state.apply(HADAMARD, [q], running)
        for k, q in enumerate(phase):
            for v, p in enumerate(instance.p):
                grover_power = ry(4.0 * coin_angle(p) * 2 ** k)
                state.apply(grover_power, [coin], running + [(q, 1)] + arm_controls(v))
        state.apply(inverse_qft(m_points), phase[::-1], running)
        stops = grid_estimates(m_points) < l1 - 1.5 * eps
        for y in np.flatnonzero(stops):
            pattern = [(q, (int(y) >> k) & 1) for k, q in enumerate(phase)]
            state.apply(PAULI_X, [clock[j - 1]], running + pattern)
        state.apply(PAULI_X, [flag], [(clock[j - 1], 1)])
        state.ledger.charge(f"gate.stage.{j}", aest_query_cost(QpeConfig(m_points, 1)))

    state.apply(PAULI_X, [clock[m]], [(clock[k], 0) for k in range(m)])
    return state
