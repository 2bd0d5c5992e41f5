"""H-scaling sweeps: instance families, per-trial rows, CSV and fits.

A sweep runs the quantum pipeline and both classical baselines on every
instance of a family, one row per (instance, trial), and fits log-log
slopes of the per-instance mean costs against ``H``.  Trials run on a
thread pool; every trial owns counter-split random streams and rows are
written in canonical order, so a fixed seed reproduces the CSV byte for
byte.
"""

from __future__ import annotations

import csv
import logging
import math
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import linregress

from .bai import best_arm, pac_arm
from .bounds import BoundReport, adversary_bound, bound_vs_model
from .classical import naive, successive_elimination
from .constants import CSV_HEADER, DEFAULT_BEST_BIAS, DEFAULT_GAMMA, DEFAULT_P_FLOOR, format_float
from .errors import ParameterError, SeparationError
from .oracle import BanditInstance, hardness, load_instances, make_instance
from .streams import NAIVE_STREAM, QUANTUM_STREAM, SE_STREAM, trial_rng

LOGGER = logging.getLogger(__name__)

FAMILIES = ("uniform-gap", "geometric-gap", "two-cluster", "from-file")
QUANTUM_WINDOW = (0.45, 0.60)
CLASSICAL_WINDOW = (0.9, 1.1)


def family_instance(family: str, n: int, gap: float, gamma: float = DEFAULT_GAMMA,
                    best: float = DEFAULT_BEST_BIAS, p_floor: float = DEFAULT_P_FLOOR) -> BanditInstance:
    """Instance of a generated family with best bias ``best`` and ``Delta_2 = gap``.

    * ``uniform-gap``: every other arm sits ``gap`` below the best;
    * ``geometric-gap``: arm ``i`` sits ``gap * gamma^(i-2)`` below;
    * ``two-cluster``: half the arms at ``gap``, the rest at ``gamma * gap``.

    Gaps are capped so that no bias drops below ``p_floor``.
    """
    cap = best - p_floor
    if n < 2:
        raise ParameterError("a sweep instance needs at least two arms")
    if not 0.0 < gap <= cap:
        raise ParameterError(f"gap {gap} outside (0, {cap:g}]")
    if family == "uniform-gap":
        gaps = [gap] * (n - 1)
    elif family == "geometric-gap":
        gaps = [min(cap, gap * gamma ** i) for i in range(n - 1)]
    elif family == "two-cluster":
        near = n // 2
        gaps = [gap] * near + [min(cap, gamma * gap)] * (n - 1 - near)
    else:
        raise ParameterError(f"unknown instance family '{family}'")
    return make_instance([best] + [max(p_floor, best - g) for g in gaps])


@dataclass(frozen=True)
class SweepSpec:
    family: str
    n_values: Tuple[int, ...]
    gaps: Tuple[float, ...]
    delta: float
    trials: int
    seed: int
    gamma: float = DEFAULT_GAMMA
    p_floor: float = DEFAULT_P_FLOOR
    path: Optional[str] = None
    eps_pac: Optional[float] = None

    def instances(self) -> List[Tuple[str, BanditInstance]]:
        """Instances in canonical order, with their ids."""
        if self.family == "from-file":
            if not self.path:
                raise ParameterError("the from-file family needs --file")
            return [(f"file-{k}", inst) for k, inst in enumerate(load_instances(self.path))]
        if self.family not in FAMILIES:
            raise ParameterError(f"unknown instance family '{self.family}'")
        return [
            (f"{self.family}-n{n}-g{format_float(gap)}",
             family_instance(self.family, n, gap, self.gamma, p_floor=self.p_floor))
            for n in self.n_values
            for gap in self.gaps
        ]


@dataclass(frozen=True)
class SweepRow:
    instance_id: str
    n: int
    H: float
    delta2: float
    delta: float
    modeled_quantum_cost: float
    raw_oracle_calls: int
    classical_se_pulls: int
    classical_naive_pulls: int
    lower_bound: float
    success: bool
    seed: int
    bound: Optional[BoundReport] = field(default=None, repr=False)

    def as_csv(self) -> List[str]:
        out = []
        for name in CSV_HEADER:
            value = getattr(self, name)
            if isinstance(value, bool):
                out.append("1" if value else "0")
            elif isinstance(value, float):
                out.append(format_float(value))
            else:
                out.append(str(value))
        return out


@dataclass(frozen=True)
class SweepFit:
    quantum_slope: float
    se_slope: float
    naive_slope: float
    points: int
    decades: float

    @property
    def quantum_in_window(self) -> bool:
        return QUANTUM_WINDOW[0] <= self.quantum_slope <= QUANTUM_WINDOW[1]

    @property
    def se_in_window(self) -> bool:
        return CLASSICAL_WINDOW[0] <= self.se_slope <= CLASSICAL_WINDOW[1]


def check_spec(spec: SweepSpec) -> List[Tuple[str, BanditInstance]]:
    """Validate a spec and return its instances."""
    if spec.trials < 1:
        raise ParameterError("a sweep needs at least one trial")
    if not 0.0 < spec.delta < 0.5:
        raise ParameterError(f"sweep delta {spec.delta} outside (0, 1/2)")
    instances = spec.instances()
    h_values = sorted({round(hardness(inst).H, 9) for _, inst in instances})
    if len(h_values) < 2:
        raise ParameterError("degenerate sweep: fewer than two distinct H values")
    for _, instance in instances:
        # refuse instances outside the floor before any trial runs
        adversary_bound(instance, spec.delta, spec.p_floor)
    decades = math.log10(h_values[-1] / h_values[0])
    if len(h_values) < 6 or decades < 3.0:
        LOGGER.warning(
            "sweep has %d distinct H values spanning %.2f decades; slopes will be loose",
            len(h_values), decades,
        )
    return instances


def run_trial(spec: SweepSpec, number: int, instance_id: str, instance: BanditInstance,
              trial: int) -> SweepRow:
    """Run the quantum pipeline and both baselines once on ``instance``."""
    gaps = hardness(instance)
    rng = trial_rng(spec.seed, number, trial, QUANTUM_STREAM)
    try:
        if spec.eps_pac is None:
            result = best_arm(instance, spec.delta, rng)
            success = result.arm == instance.best
        else:
            result = pac_arm(instance, spec.eps_pac, spec.delta, rng)
            success = instance.bias(result.arm) >= max(instance.p) - spec.eps_pac
        ledger = result.ledger
        report = bound_vs_model(instance, spec.delta, spec.p_floor, result)
    except SeparationError as exc:
        LOGGER.warning("%s trial %d: %s", instance_id, trial, exc)
        success = False
        ledger = exc.ledger
        report = bound_vs_model(instance, spec.delta, spec.p_floor, ledger=ledger)
    _, se_pulls = successive_elimination(instance, spec.delta, trial_rng(spec.seed, number, trial, SE_STREAM))
    _, naive_total = naive(instance, gaps.delta2, spec.delta, trial_rng(spec.seed, number, trial, NAIVE_STREAM))
    return SweepRow(
        instance_id=instance_id,
        n=instance.n,
        H=gaps.H,
        delta2=gaps.delta2,
        delta=spec.delta,
        modeled_quantum_cost=ledger.modeled_cost,
        raw_oracle_calls=ledger.oracle_calls,
        classical_se_pulls=se_pulls,
        classical_naive_pulls=naive_total,
        lower_bound=report.lower_bound,
        success=success,
        seed=spec.seed,
        bound=report,
    )


def run_sweep(spec: SweepSpec, threads: int = 1) -> List[SweepRow]:
    """Run every (instance, trial) of ``spec``; rows come back in canonical order."""
    instances = check_spec(spec)
    tasks = [
        (number, instance_id, instance, trial)
        for number, (instance_id, instance) in enumerate(instances)
        for trial in range(spec.trials)
    ]
    LOGGER.info("sweep: %d instance(s), %d task(s), %d thread(s)", len(instances), len(tasks), threads)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        return list(pool.map(lambda task: run_trial(spec, *task), tasks))


@dataclass(frozen=True)
class BoundSummary:
    """Spread of modeled cost over lower bound across the rows of a sweep."""

    min_ratio: float
    max_ratio: float
    violations: Tuple[str, ...]

    @property
    def holds(self) -> bool:
        return not self.violations


def bound_summary(rows: Sequence[SweepRow]) -> BoundSummary:
    """Collect the lower-bound reports of ``rows``; ids of violating instances come once each."""
    reports = [(row.instance_id, row.bound) for row in rows if row.bound is not None]
    if not reports:
        raise ParameterError("no lower-bound reports in these rows")
    ratios = [report.ratio for _, report in reports]
    violations = tuple(OrderedDict.fromkeys(i for i, report in reports if not report.holds))
    return BoundSummary(min(ratios), max(ratios), violations)


def instance_means(rows: Sequence[SweepRow]) -> "OrderedDict[str, Dict[str, float]]":
    """Per-instance means of H and of the three cost columns."""
    grouped: "OrderedDict[str, List[SweepRow]]" = OrderedDict()
    for row in rows:
        grouped.setdefault(row.instance_id, []).append(row)
    means: "OrderedDict[str, Dict[str, float]]" = OrderedDict()
    for instance_id, group in grouped.items():
        means[instance_id] = {
            "H": group[0].H,
            "n": float(group[0].n),
            "quantum": float(np.mean([r.modeled_quantum_cost for r in group])),
            "se": float(np.mean([r.classical_se_pulls for r in group])),
            "naive": float(np.mean([r.classical_naive_pulls for r in group])),
            "lower_bound": group[0].lower_bound,
            "success": float(np.mean([r.success for r in group])),
        }
    return means


def fit_slopes(rows: Sequence[SweepRow], eps_pac: Optional[float] = None) -> SweepFit:
    """Log-log slopes of mean costs against ``H`` (or ``min(n/eps^2, H)`` for PAC sweeps)."""
    means = instance_means(rows)
    if eps_pac is None:
        x = np.array([m["H"] for m in means.values()])
    else:
        x = np.array([min(m["n"] / eps_pac ** 2, m["H"]) for m in means.values()])
    if len(np.unique(x)) < 2:
        raise ParameterError("cannot fit slopes on fewer than two distinct H values")
    log_x = np.log(x)

    def slope(column: str) -> float:
        return float(linregress(log_x, np.log([m[column] for m in means.values()])).slope)

    return SweepFit(
        quantum_slope=slope("quantum"),
        se_slope=slope("se"),
        naive_slope=slope("naive"),
        points=len(x),
        decades=float(math.log10(x.max() / x.min())),
    )


def write_csv(rows: Sequence[SweepRow], path) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow(row.as_csv())
    LOGGER.info("wrote %d row(s) to %s", len(rows), path)
    return path


def write_gnuplot(rows: Sequence[SweepRow], path) -> Path:
    """Whitespace-separated per-instance means for plotting against ``H``."""
    path = Path(path)
    lines = ["# H mean_quantum_cost mean_se_pulls mean_naive_pulls lower_bound"]
    for m in instance_means(rows).values():
        lines.append(" ".join(format_float(m[k]) for k in ("H", "quantum", "se", "naive", "lower_bound")))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
