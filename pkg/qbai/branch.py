"""Branch-structured statevectors.

The variable-time algorithm never mixes the branches of different arms:
every gate is either controlled on the arm register or acts inside one
branch.  Its output state is therefore a sum of mutually orthogonal
components, each labeled by

* ``arm`` - the arm index held in register I;
* ``clock`` - the stage at which the branch stopped (``m+1`` when it
  never stopped, 0 before the termination step);
* ``garbage`` - an orthogonality label standing in for the phase
  registers (one label per stage and outcome bit);
* ``flag`` - the value of register F.

Components with different label tuples are orthogonal, so the state is
fully described by a table of labels and amplitudes.  :class:`BranchState`
stores that table as read-only numpy columns.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Tuple

import numpy as np

from .amplitude import Amplitude
from .constants import NORM_TOL
from .errors import ParameterError

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class BranchComponent:
    arm: int
    clock: int
    garbage: int
    flag: int
    amp: Amplitude


def _frozen(values, dtype) -> np.ndarray:
    array = np.array(values, dtype=dtype)
    array.setflags(write=False)
    return array


class BranchState:
    """Immutable branch-structured state over ``n_arms`` arms."""

    def __init__(self, arm, clock, garbage, flag, amp, n_arms: int) -> None:
        self.arm = _frozen(arm, np.int64)
        self.clock = _frozen(clock, np.int64)
        self.garbage = _frozen(garbage, np.int64)
        self.flag = _frozen(flag, np.int64)
        self.amp = _frozen(amp, np.complex128)
        self.n_arms = int(n_arms)
        sizes = {len(self.arm), len(self.clock), len(self.garbage), len(self.flag), len(self.amp)}
        if len(sizes) != 1:
            raise ParameterError("branch columns have different lengths")

    @classmethod
    def from_components(cls, components: Iterable[BranchComponent], n_arms: int) -> "BranchState":
        rows = list(components)
        return cls(
            [c.arm for c in rows],
            [c.clock for c in rows],
            [c.garbage for c in rows],
            [c.flag for c in rows],
            [complex(c.amp) for c in rows],
            n_arms,
        )

    @classmethod
    def empty(cls, n_arms: int) -> "BranchState":
        return cls([], [], [], [], [], n_arms)

    def __len__(self) -> int:
        return len(self.amp)

    @property
    def components(self) -> List[BranchComponent]:
        return [
            BranchComponent(int(a), int(c), int(g), int(f), Amplitude(complex(z)))
            for a, c, g, f, z in zip(self.arm, self.clock, self.garbage, self.flag, self.amp)
        ]

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amp) ** 2))

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm_squared() - 1.0) <= tol

    def select(self, mask: np.ndarray, scale: float = 1.0) -> "BranchState":
        """Return the components where ``mask`` holds, amplitudes times ``scale``."""
        return BranchState(
            self.arm[mask], self.clock[mask], self.garbage[mask], self.flag[mask],
            self.amp[mask] * scale, self.n_arms,
        )

    def arm_masses(self) -> Dict[int, float]:
        """Return the Born-rule mass of each arm value."""
        weights = np.abs(self.amp) ** 2
        arms, inverse = np.unique(self.arm, return_inverse=True)
        totals = np.bincount(inverse, weights=weights, minlength=len(arms))
        return {int(a): float(w) for a, w in zip(arms, totals)}

    def clock_masses(self, slots: int) -> np.ndarray:
        """Return the mass of clock values ``1..slots`` as an array."""
        weights = np.abs(self.amp) ** 2
        totals = np.bincount(self.clock, weights=weights, minlength=slots + 1)
        return totals[1:slots + 1]

    def outcome_distribution(self) -> Dict[Tuple[int, int, int], float]:
        """Return the joint law of (arm, clock, flag), summed over garbage."""
        out: Dict[Tuple[int, int, int], float] = {}
        weights = np.abs(self.amp) ** 2
        for a, c, f, w in zip(self.arm, self.clock, self.flag, weights):
            key = (int(a), int(c), int(f))
            out[key] = out.get(key, 0.0) + float(w)
        return out


def project_flag(state: BranchState, bit: int) -> Tuple[BranchState, float]:
    """Project onto ``F = bit``; return the normalized part and its squared norm."""
    mask = state.flag == bit
    mass = float(np.sum(np.abs(state.amp[mask]) ** 2))
    if mass == 0.0:
        return BranchState.empty(state.n_arms), 0.0
    return state.select(mask, 1.0 / np.sqrt(mass)), mass


def _keys(state: BranchState, radix: Tuple[int, int, int]) -> np.ndarray:
    clocks, garbages, _ = radix
    return ((state.arm * clocks + state.clock) * garbages + state.garbage) * 2 + state.flag


def _collapse(keys: np.ndarray, amps: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    unique, inverse = np.unique(keys, return_inverse=True)
    summed = np.zeros(len(unique), dtype=np.complex128)
    np.add.at(summed, inverse, amps)
    return unique, summed


def inner_product(a: BranchState, b: BranchState) -> Amplitude:
    """Return ``<a|b>``, summing over components with identical labels."""
    if a.n_arms != b.n_arms:
        raise ParameterError(f"mismatched arm counts {a.n_arms} and {b.n_arms}")
    if len(a) == 0 or len(b) == 0:
        return Amplitude(0.0, 0.0)
    radix = (
        int(max(a.clock.max(), b.clock.max())) + 1,
        int(max(a.garbage.max(), b.garbage.max())) + 1,
        2,
    )
    keys_a, amps_a = _collapse(_keys(a, radix), a.amp)
    keys_b, amps_b = _collapse(_keys(b, radix), b.amp)
    _, ia, ib = np.intersect1d(keys_a, keys_b, assume_unique=True, return_indices=True)
    return Amplitude(complex(np.sum(np.conj(amps_a[ia]) * amps_b[ib])))


def total_variation(p: Dict, q: Dict) -> float:
    """Half the L1 distance between two discrete laws given as dicts."""
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)
