"""Numeric plumbing shared by every module.

Two arithmetic modes exist per run: exact rationals (``fractions.Fraction``)
and binary floats compared with a relative tolerance.  A matrix is homogeneous
in one mode; comparisons dispatch on the value types, so exact data is never
subject to a tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Union

Num = Union[int, float, Fraction]

RATIONAL = "rational"
FLOAT = "float"

# Exact arithmetic is the default up to this many cells; beyond it the CLI
# falls back to floats unless exact mode is forced.
EXACT_CELL_LIMIT = 64


@dataclass(frozen=True)
class RunConfig:
    """Per-run knobs: arithmetic mode, tolerances and size guards."""

    mode: str = RATIONAL
    eps: float = 1e-9
    tau_zero: float = 0.0
    max_bruteforce_cells: int = 36
    max_cycle_length: int = 6
    allow_incoherent: bool = False
    output_format: str = "json"

    def __post_init__(self) -> None:
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.max_bruteforce_cells <= 0 or self.max_cycle_length <= 0:
            raise ValueError("guard limits must be positive")

    def with_allow_incoherent(self, flag: bool) -> "RunConfig":
        return replace(self, allow_incoherent=flag)


DEFAULT_CONFIG = RunConfig()


def is_exact(x: Num) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def is_positive(x: Num, cfg: RunConfig = DEFAULT_CONFIG) -> bool:
    """Support test: strict in exact mode, above ``tau_zero`` for floats."""
    if is_exact(x):
        return x > 0
    return x > cfg.tau_zero


def numbers_close(a: Num, b: Num, cfg: RunConfig = DEFAULT_CONFIG) -> bool:
    """Equality up to ``eps * max(1, |a|, |b|)``; exact when both are exact."""
    if is_exact(a) and is_exact(b):
        return a == b
    fa, fb = float(a), float(b)
    return abs(fa - fb) <= cfg.eps * max(1.0, abs(fa), abs(fb))


def as_exact(x: Num) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return Fraction(x)
    raise TypeError(f"not an exact number: {x!r}")


def coerce_entry(x: Num, exact: bool) -> Num:
    """Bring one entry into the requested mode."""
    if exact:
        return as_exact(x)
    return float(x)


def format_number(x: Num):
    """JSON-friendly form: exact values as 'a/b' strings, floats as floats."""
    if is_exact(x):
        return str(Fraction(x))
    return float(x)
