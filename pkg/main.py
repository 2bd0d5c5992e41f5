#!/usr/bin/env python3
"""Command line interface for the quantum best-arm identification simulator.

Each subcommand runs one experiment on a bandit instance given inline
with ``--p`` or as a JSON file with ``--file``::

    python3 main.py bestarm --p 0.9,0.1 --delta 0.05 --trials 400 --seed 7
    python3 main.py pac --p 0.6,0.55,0.3 --eps 0.2 --trials 100
    python3 main.py sweep --family uniform-gap --n 2,4,8,16 --gaps 0.5,0.25,0.125 --out sweep.csv
    python3 main.py baseline --p 0.9,0.5,0.4 --trials 50
    python3 main.py bound --p 0.6,0.4 --p-floor 0.25 --delta 0.05
    python3 main.py fixedbudget --p 0.9,0.1 --budget 1e7 --trials 50
    python3 main.py validate --level quick

Any flag can also be given in a ``--config`` file (see
:mod:`qbai.config`); explicit flags win.  Reports go to stdout,
diagnostics to stderr (``-v`` for progress, ``-vv`` for every round).

Exit status is 0 on success, 1 when a statistical check or validation
suite fails and 2 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from qbai.bai import (
    BaiResult,
    best_arm,
    calibrate_tc,
    fixed_budget,
    fixed_budget_bound,
    pac_arm,
    plan_fixed_budget,
)
from qbai.bounds import adversary_bound
from qbai.classical import naive, naive_pulls, successive_elimination
from qbai.config import Settings, resolve_settings, thread_count
from qbai.errors import ConfigError, NoDecisionError, QbaiError, SeparationError
from qbai.montecarlo import binomial_ci, sigma, success_floor
from qbai.oracle import BanditInstance, hardness, load_instance, make_instance
from qbai.streams import NAIVE_STREAM, QUANTUM_STREAM, SE_STREAM, trial_rng
from qbai.sweep import SweepSpec, bound_summary, fit_slopes, run_sweep, write_csv, write_gnuplot
from qbai.validate import run_suites, summary

LOGGER = logging.getLogger("qbai.cli")

LOG_FORMAT = "[%(levelname)s] %(name)s: %(message)s"
CALIBRATION_DELTAS = (0.05, 0.1, 0.2, 0.3)

# (name, metavar, help) of every value flag; all of them are strings
# here and parsed by qbai.config so that file values go through the
# same conversion.
FLAGS = (
    ("--p", "P1,P2,...", "comma separated arm biases"),
    ("--file", "PATH", 'JSON instance file {"p": [...]}'),
    ("--delta", "DELTA", "failure probability (default 0.05)"),
    ("--eps", "EPS", "accuracy of PAC identification"),
    ("--trials", "N", "number of independent trials (default 1)"),
    ("--seed", "SEED", "master random seed (default 7)"),
    ("--out", "PATH", "output file (sweep CSV, validation JSON)"),
    ("--p-floor", "P", "lower bias limit of the adversary bound (default 0.1)"),
    ("--family", "NAME", "sweep family: uniform-gap, geometric-gap, two-cluster, from-file"),
    ("--n", "N1,N2,...", "sweep arm counts"),
    ("--gaps", "G1,G2,...", "sweep gaps Delta_2"),
    ("--gamma", "GAMMA", "gap ratio of the geometric and two-cluster families"),
    ("--budget", "T", "query budget of fixed-budget identification"),
    ("--tc-table", "D:TC,...", "fixed-confidence cost quantiles per delta"),
    ("--level", "LEVEL", "validation level: quick or full"),
    ("--gnuplot", "PATH", "also write per-instance means for gnuplot"),
    ("--delta2-floor", "GAP", "smallest gap Locate keeps shrinking for"),
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Quantum best-arm identification experiments.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key = value file with default flag values")
    common.add_argument("-v", "--verbose", action="count", default=0,
                        help="-v for progress, -vv for per-round detail")
    for flag, metavar, text in FLAGS:
        common.add_argument(flag, metavar=metavar, default=None, help=text)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("bestarm", "identify the best arm, repeated over trials"),
        ("pac", "identify an eps-optimal arm, repeated over trials"),
        ("sweep", "H-scaling sweep over an instance family; writes CSV"),
        ("baseline", "classical successive elimination and uniform sampling"),
        ("bound", "adversary lower bound of an instance"),
        ("validate", "run the property suites"),
        ("fixedbudget", "fixed-budget identification by majority vote"),
    ):
        sub.add_parser(name, parents=[common], help=text)
    return parser


def load_settings(args: argparse.Namespace) -> Settings:
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "verbose", "config")}
    return resolve_settings(flags, args.config)


def instance_from(settings: Settings) -> BanditInstance:
    if settings.p is not None:
        return make_instance(settings.p)
    if settings.file:
        return load_instance(settings.file)
    raise ConfigError("an instance is required: give --p or --file")


def _map_trials(fn: Callable[[int], object], trials: int, threads: int) -> List:
    if threads <= 1:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(trials)))


def format_transcript(result: BaiResult) -> List[str]:
    lines = []
    for record in result.transcript:
        lines.append(f"round {record.iteration}  delta={record.delta:.4g}")
        for shrink in (record.first, record.second):
            lines.append(
                f"  I{shrink.k} {shrink.interval} -> {shrink.result}"
                f"  r=({shrink.r1:.5f}, {shrink.r2:.5f})  B=({int(shrink.b1)}, {int(shrink.b2)})"
            )
    i1, i2 = result.intervals
    lines.append(f"final I1={i1} I2={i2}{'  (eps-break)' if result.eps_break else ''}")
    return lines


def _print_ledger(result: BaiResult) -> None:
    ledger = result.ledger
    print(f"{'component':>14} {'raw calls':>12} {'modeled cost':>14}")
    print("-" * 42)
    names = sorted(set(ledger.breakdown) | set(ledger.modeled_breakdown))
    for name in names:
        print(f"{name:>14} {ledger.breakdown.get(name, 0):12d} {ledger.modeled_breakdown.get(name, 0.0):14.6g}")


def _identification_report(instance: BanditInstance, settings: Settings, threads: int,
                           run: Callable[[np.random.Generator], BaiResult],
                           correct: Callable[[int], bool]) -> int:
    def trial(t: int) -> Tuple[Optional[BaiResult], bool]:
        rng = trial_rng(settings.seed, 0, t, QUANTUM_STREAM)
        try:
            result = run(rng)
        except SeparationError as exc:
            LOGGER.warning("trial %d: %s", t, exc)
            return None, False
        return result, correct(result.arm)

    outcomes = _map_trials(trial, settings.trials, threads)
    costs = []
    for t, (result, ok) in enumerate(outcomes):
        if result is None:
            print(f"trial {t}: no separation")
            continue
        costs.append(result.ledger.modeled_cost)
        print(f"trial {t}: arm {result.arm} {'ok' if ok else 'WRONG'}  rounds {result.rounds}"
              f"  modeled cost {result.ledger.modeled_cost:.6g}  raw calls {result.ledger.oracle_calls}")
    if settings.trials == 1 and outcomes[0][0] is not None:
        for line in format_transcript(outcomes[0][0]):
            print(line)
        _print_ledger(outcomes[0][0])

    successes = sum(ok for _, ok in outcomes)
    rate = successes / settings.trials
    low, high = binomial_ci(successes, settings.trials)
    floor = success_floor(1.0 - settings.delta, settings.trials)
    print(f"H = {hardness(instance).H:.6g}" if instance.n > 1 else "single arm")
    print(f"success rate {rate:.4f} ({successes}/{settings.trials}), 95% CI [{low:.4f}, {high:.4f}]")
    if costs:
        print(f"mean modeled cost {np.mean(costs):.6g}")
    print(f"required {floor:.4f} (1 - delta - 3 sigma)")
    return 0 if rate >= floor else 1


def cmd_bestarm(settings: Settings, threads: int) -> int:
    instance = instance_from(settings)
    return _identification_report(
        instance, settings, threads,
        lambda rng: best_arm(instance, settings.delta, rng, delta2_floor=settings.delta2_floor),
        lambda arm: arm == instance.best,
    )


def cmd_pac(settings: Settings, threads: int) -> int:
    instance = instance_from(settings)
    if settings.eps is None:
        raise ConfigError("pac needs --eps")
    eps = settings.eps
    top = max(instance.p)
    return _identification_report(
        instance, settings, threads,
        lambda rng: pac_arm(instance, eps, settings.delta, rng, delta2_floor=settings.delta2_floor),
        lambda arm: instance.bias(arm) >= top - eps,
    )


def cmd_sweep(settings: Settings, threads: int) -> int:
    spec = SweepSpec(
        family=settings.family,
        n_values=settings.n,
        gaps=settings.gaps,
        delta=settings.delta,
        trials=settings.trials,
        seed=settings.seed,
        gamma=settings.gamma,
        p_floor=settings.p_floor,
        path=settings.file,
        eps_pac=settings.eps,
    )
    rows = run_sweep(spec, threads)
    out = write_csv(rows, settings.out or "sweep.csv")
    print(f"wrote {len(rows)} rows to {out}")
    if settings.gnuplot:
        print(f"wrote plot data to {write_gnuplot(rows, settings.gnuplot)}")
    fit = fit_slopes(rows, spec.eps_pac)
    print(f"{fit.points} instances, H spans {fit.decades:.2f} decades")
    print(f"quantum slope {fit.quantum_slope:.3f}  (expected 0.45..0.60: {'yes' if fit.quantum_in_window else 'no'})")
    print(f"SE slope      {fit.se_slope:.3f}  (expected 0.9..1.1: {'yes' if fit.se_in_window else 'no'})")
    print(f"naive slope   {fit.naive_slope:.3f}")
    bounds = bound_summary(rows)
    print(f"modeled cost / lower bound {bounds.min_ratio:.4g} .. {bounds.max_ratio:.4g}")
    if not bounds.holds:
        print(f"lower bound above modeled cost on {len(bounds.violations)} instance(s): {', '.join(bounds.violations)}")
        return 1
    return 0


def cmd_baseline(settings: Settings, threads: int) -> int:
    instance = instance_from(settings)
    gaps = hardness(instance)

    def trial(t: int) -> Tuple[int, int, int, int]:
        se_arm, se_pulls = successive_elimination(instance, settings.delta, trial_rng(settings.seed, 0, t, SE_STREAM))
        nv_arm, nv_pulls = naive(instance, gaps.delta2, settings.delta, trial_rng(settings.seed, 0, t, NAIVE_STREAM))
        return se_arm, se_pulls, nv_arm, nv_pulls

    outcomes = _map_trials(trial, settings.trials, threads)
    print(f"H = {gaps.H:.6g}  Delta_2 = {gaps.delta2:.6g}")
    print(f"naive pulls per arm {naive_pulls(instance.n, gaps.delta2, settings.delta)}")
    print(f"{'method':>22} {'success':>8} {'mean pulls':>12} {'pulls / H':>10}")
    print("-" * 55)
    for name, arm_at, pulls_at in (("successive elimination", 0, 1), ("uniform sampling", 2, 3)):
        rate = np.mean([o[arm_at] == instance.best for o in outcomes])
        pulls = float(np.mean([o[pulls_at] for o in outcomes]))
        print(f"{name:>22} {rate:8.4f} {pulls:12.6g} {pulls / gaps.H:10.4g}")
    return 0


def cmd_bound(settings: Settings, threads: int) -> int:
    instance = instance_from(settings)
    bound = adversary_bound(instance, settings.delta, settings.p_floor)
    h = hardness(instance).H
    print(f"H = {h:.6g}  sqrt(H) = {math.sqrt(h):.6g}")
    print(f"intermediate bound {bound.intermediate:.6g}")
    print(f"simplified bound   {bound.simplified:.6g}")
    print(f"bound / sqrt(H)    {bound.intermediate / math.sqrt(h):.6g}")
    return 0


def cmd_validate(settings: Settings, threads: int) -> int:
    results = run_suites(settings.level, settings.seed)
    report = summary(results, settings.level)
    text = json.dumps(report, indent=2)
    print(text)
    if settings.out:
        Path(settings.out).write_text(text + "\n", encoding="utf-8")
    for result in results:
        if not result.passed:
            print(f"suite {result.name} FAILED ({result.violations} violation(s))", file=sys.stderr)
            for message in result.failures:
                print(f"  {message}", file=sys.stderr)
    return 0 if report["passed"] else 1


def cmd_fixedbudget(settings: Settings, threads: int) -> int:
    instance = instance_from(settings)
    if settings.budget is None:
        raise ConfigError("fixedbudget needs --budget")
    table = settings.tc_table
    if not table:
        LOGGER.info("calibrating Tc on %d trial(s) per delta", max(settings.trials, 20))
        table = calibrate_tc(instance, CALIBRATION_DELTAS, max(settings.trials, 20), settings.seed + 1,
                             delta2_floor=settings.delta2_floor)
    delta, runs = plan_fixed_budget(settings.budget, table)
    bound = fixed_budget_bound(settings.budget, table)
    print("Tc table: " + ", ".join(f"{d:g}:{tc:.6g}" for d, tc in sorted(table.items())))
    print(f"delta* = {delta:g}, {runs} run(s) of at most {table[delta]:.6g}")

    def trial(t: int) -> bool:
        rng = trial_rng(settings.seed, 0, t, QUANTUM_STREAM)
        try:
            return fixed_budget(instance, settings.budget, table, rng,
                                delta2_floor=settings.delta2_floor) != instance.best
        except (NoDecisionError, SeparationError) as exc:
            LOGGER.info("trial %d: %s", t, exc)
            return True

    failures = sum(_map_trials(trial, settings.trials, threads))
    rate = failures / settings.trials
    limit = bound + 3.0 * sigma(bound, settings.trials)
    print(f"failure rate {rate:.4f} ({failures}/{settings.trials}), guaranteed {bound:.4g}")
    return 0 if rate <= limit else 1


COMMANDS: Dict[str, Callable[[Settings, int], int]] = {
    "bestarm": cmd_bestarm,
    "pac": cmd_pac,
    "sweep": cmd_sweep,
    "baseline": cmd_baseline,
    "bound": cmd_bound,
    "validate": cmd_validate,
    "fixedbudget": cmd_fixedbudget,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point for the command line interface."""
    args = build_parser().parse_args(argv)
    level = (logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)]
    logging.basicConfig(level=level, format=LOG_FORMAT)
    try:
        settings = load_settings(args)
        if settings.trials < 1:
            raise ConfigError("--trials must be at least 1")
        return COMMANDS[args.command](settings, thread_count())
    except QbaiError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
