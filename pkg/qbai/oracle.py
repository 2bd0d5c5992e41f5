"""Bandit instances, coin states and the hardness quantity H.

A :class:`BanditInstance` is an immutable tuple of Bernoulli biases with
their arm indices.  Arms are numbered from 1 in the order given; the
biases are never sorted, so algorithms cannot rely on the order.  The
synthetic perfect arm appended by Shrink gets index 0.

The quantum oracle maps ``|i>|0>`` to ``|i>|coin p_i>``; in this
simulator it is represented by the pair of coin amplitudes of each arm
(:func:`coin_amplitudes`) and, at gate level, by a controlled ``R_y``
rotation.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Sequence, Tuple

from .errors import InstanceError

LOGGER = logging.getLogger(__name__)

PERFECT_ARM = 0


@dataclass(frozen=True)
class BanditInstance:
    """Biases ``p`` of the arms listed in ``indices``.

    ``best`` is the index (not the position) of the unique best arm.
    """

    p: Tuple[float, ...]
    indices: Tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.p)

    @property
    def best(self) -> int:
        return self.indices[max(range(self.n), key=self.p.__getitem__)]

    @property
    def has_perfect_arm(self) -> bool:
        return PERFECT_ARM in self.indices

    def bias(self, index: int) -> float:
        """Return the bias of the arm with index ``index``."""
        return self.p[self.indices.index(index)]

    def sorted_biases(self) -> List[float]:
        """Return the biases in decreasing order (a sorted copy)."""
        return sorted(self.p, reverse=True)

    def permuted(self, order: Sequence[int]) -> "BanditInstance":
        """Return the instance whose position ``j`` holds position ``order[j]``.

        Arm indices travel with their biases, so the best index changes.
        """
        return make_instance([self.p[k] for k in order])


@dataclass(frozen=True)
class GapProfile:
    """Gaps of the sorted biases and the hardness ``H``."""

    delta: Tuple[float, ...]
    H: float
    delta2: float


def _check_bias(value: float) -> float:
    value = float(value)
    if not (0.0 <= value <= 1.0) or math.isnan(value):
        raise InstanceError(f"bias {value} outside [0, 1]")
    return value


def make_instance(p: Sequence[float]) -> BanditInstance:
    """Validate the biases and build an instance with indices 1..n."""
    biases = tuple(_check_bias(x) for x in p)
    if not biases:
        raise InstanceError("instance has no arms")
    top = max(biases)
    if biases.count(top) > 1:
        raise InstanceError("best arm not unique")
    return BanditInstance(p=biases, indices=tuple(range(1, len(biases) + 1)))


def hardness(instance: BanditInstance) -> GapProfile:
    """Return the sorted gaps, ``H = sum 1/Delta_i^2`` and ``Delta_2``."""
    if instance.n < 2:
        raise InstanceError("hardness needs at least two arms")
    ordered = instance.sorted_biases()
    gaps = tuple(ordered[0] - x for x in ordered[1:])
    return GapProfile(delta=gaps, H=sum(1.0 / g ** 2 for g in gaps), delta2=min(gaps))


def append_perfect_arm(instance: BanditInstance) -> BanditInstance:
    """Return the instance with arm 0 of bias exactly 1 in front."""
    if instance.n == 0:
        raise InstanceError("cannot extend an empty instance")
    if instance.has_perfect_arm:
        raise InstanceError("instance already carries the synthetic arm")
    return BanditInstance(p=(1.0,) + instance.p, indices=(PERFECT_ARM,) + instance.indices)


def coin_amplitudes(p: float) -> Tuple[float, float]:
    """Return ``(sqrt(1-p), sqrt(p))``, the amplitudes of ``|0>`` and ``|1>``."""
    p = _check_bias(p)
    return math.sqrt(1.0 - p), math.sqrt(p)


def load_instances(path) -> List[BanditInstance]:
    """Read ``{"p": [...]}`` or ``{"instances": [{"p": [...]}, ...]}``."""
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise InstanceError(f"cannot read instance file {path}: {exc}") from exc
    if isinstance(data, dict) and "instances" in data:
        entries = data["instances"]
    else:
        entries = [data]
    instances = []
    for entry in entries:
        if not isinstance(entry, dict) or "p" not in entry:
            raise InstanceError(f"{path}: every instance needs a 'p' list")
        instances.append(make_instance(entry["p"]))
    LOGGER.debug("loaded %d instance(s) from %s", len(instances), path)
    return instances


def load_instance(path) -> BanditInstance:
    """Read a single instance file."""
    instances = load_instances(path)
    if len(instances) != 1:
        raise InstanceError(f"{path} holds {len(instances)} instances, expected 1")
    return instances[0]
