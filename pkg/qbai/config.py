"""Run settings: defaults, config files and the environment.

A config file is plain text with one ``key = value`` per line; keys are
the long flag names (``p-floor`` and ``p_floor`` are the same key) and
``#`` starts a comment::

    # sweep.cfg
    family = uniform-gap
    n = 2,4,8,16
    gaps = 0.5,0.25,0.125
    delta = 0.05
    seed = 7

Explicit command line flags override file values, which override the
defaults.  ``QBAI_THREADS`` caps the worker pool of sweeps.
"""

from __future__ import annotations

import configparser
import dataclasses
import logging
import os
from dataclasses import dataclass
from typing import Any, Dict, Mapping, Optional, Tuple

from .constants import (
    DEFAULT_DELTA,
    DEFAULT_GAMMA,
    DEFAULT_P_FLOOR,
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    DELTA2_FLOOR,
    THREADS_ENV,
)
from .errors import ConfigError

LOGGER = logging.getLogger(__name__)

_SECTION = "qbai"


def _floats(text: str) -> Tuple[float, ...]:
    return tuple(float(x) for x in text.replace(" ", "").split(",") if x)


def _ints(text: str) -> Tuple[int, ...]:
    return tuple(int(x) for x in text.replace(" ", "").split(",") if x)


def _tc_table(text: str) -> Dict[float, float]:
    """Parse ``delta:Tc,delta:Tc,...``."""
    table = {}
    for item in text.replace(" ", "").split(","):
        if not item:
            continue
        delta, _, tc = item.partition(":")
        table[float(delta)] = float(tc)
    return table


@dataclass
class Settings:
    p: Optional[Tuple[float, ...]] = None
    file: Optional[str] = None
    delta: float = DEFAULT_DELTA
    eps: Optional[float] = None
    trials: int = DEFAULT_TRIALS
    seed: int = DEFAULT_SEED
    out: Optional[str] = None
    p_floor: float = DEFAULT_P_FLOOR
    family: str = "uniform-gap"
    n: Tuple[int, ...] = (2, 4, 8, 16)
    gaps: Tuple[float, ...] = (0.5, 0.25, 0.125, 0.0625)
    gamma: float = DEFAULT_GAMMA
    budget: Optional[float] = None
    tc_table: Optional[Dict[float, float]] = None
    level: str = "quick"
    gnuplot: Optional[str] = None
    delta2_floor: float = DELTA2_FLOOR


_PARSERS = {
    "p": _floats,
    "file": str,
    "delta": float,
    "eps": float,
    "trials": int,
    "seed": int,
    "out": str,
    "p_floor": float,
    "family": str,
    "n": _ints,
    "gaps": _floats,
    "gamma": float,
    "budget": float,
    "tc_table": _tc_table,
    "level": str,
    "gnuplot": str,
    "delta2_floor": float,
}


def _normalize(key: str) -> str:
    return key.strip().lstrip("-").replace("-", "_")


def parse_value(key: str, raw: Any) -> Any:
    """Convert ``raw`` to the type of setting ``key``; strings are parsed."""
    key = _normalize(key)
    if key not in _PARSERS:
        raise ConfigError(f"unknown setting '{key}'")
    if not isinstance(raw, str):
        return raw
    try:
        return _PARSERS[key](raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc


def load_config(path) -> Dict[str, Any]:
    """Read a ``key = value`` file into typed setting values."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    try:
        with open(path, encoding="utf-8") as handle:
            parser.read_string(f"[{_SECTION}]\n" + handle.read(), source=str(path))
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    values = {_normalize(k): parse_value(k, v) for k, v in parser[_SECTION].items()}
    LOGGER.debug("config %s: %s", path, values)
    return values


def resolve_settings(flags: Mapping[str, Any], config_path: Optional[str] = None) -> Settings:
    """Merge defaults, file values and explicit flags (``None`` means not given)."""
    merged: Dict[str, Any] = {}
    if config_path:
        merged.update(load_config(config_path))
    for key, value in flags.items():
        key = _normalize(key)
        if key in _PARSERS and value is not None:
            merged[key] = parse_value(key, value)
    known = {f.name for f in dataclasses.fields(Settings)}
    return Settings(**{k: v for k, v in merged.items() if k in known})


def thread_count(environ: Optional[Mapping[str, str]] = None) -> int:
    """Worker count from ``QBAI_THREADS`` (default 1)."""
    environ = os.environ if environ is None else environ
    raw = environ.get(THREADS_ENV)
    if raw is None or raw == "":
        return 1
    try:
        threads = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc
    if threads < 1:
        raise ConfigError(f"{THREADS_ENV} must be at least 1, got {threads}")
    return threads
