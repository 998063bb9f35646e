"""Joint-distribution ground truth for generation and round-trip testing.

A joint table over the two variables induces the conditional pair by row and
column normalization; assessments built this way are coherent by
construction and their true marginals are the joint's row and column sums.
That gives an independent yardstick for every fast path in the package.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .coherence import check_coherence
from .errors import MaskError
from .marginals import solve_marginals
from .matrix import Assessment, Grid, make_assessment, make_stochastic
from .numeric import DEFAULT_CONFIG, Num, RunConfig, is_positive, numbers_close

# Random joint entries are integer weights in 1..WEIGHT_CAP over the mask,
# normalized by their total, so exact mode gets small denominators.
WEIGHT_CAP = 12


@dataclass(frozen=True)
class Joint:
    """Nonnegative grid summing to one with no all-zero row or column."""

    entries: Grid

    @property
    def nrows(self) -> int:
        return len(self.entries)

    @property
    def ncols(self) -> int:
        return len(self.entries[0])

    @property
    def exact(self) -> bool:
        x = self.entries[0][0]
        return isinstance(x, (int, Fraction))

    def at(self, i: int, j: int) -> Num:
        return self.entries[i - 1][j - 1]


@dataclass(frozen=True)
class RoundtripResult:
    ok: bool
    detail: str = ""


def make_joint(rows: Iterable[Iterable[Num]], cfg: RunConfig = DEFAULT_CONFIG) -> Joint:
    grid = tuple(tuple(r) for r in rows)
    if not grid or not grid[0]:
        raise ValueError("joint must have at least one row and one column")
    if any(len(r) != len(grid[0]) for r in grid):
        raise ValueError("all rows must have the same length")
    if any(x < 0 for r in grid for x in r):
        raise ValueError("joint entries must be nonnegative")
    total = sum(x for r in grid for x in r)
    if not numbers_close(total, 1, cfg):
        raise ValueError(f"joint sums to {total}, expected 1")
    for i, r in enumerate(grid, start=1):
        if not any(is_positive(x, cfg) for x in r):
            raise ValueError(f"row {i} of the joint is all zero")
    for j in range(len(grid[0])):
        if not any(is_positive(r[j], cfg) for r in grid):
            raise ValueError(f"column {j + 1} of the joint is all zero")
    return Joint(grid)


def _validate_mask(
    mask: frozenset[tuple[int, int]], n_rows: int, n_cols: int
) -> None:
    for i, j in mask:
        if not (1 <= i <= n_rows and 1 <= j <= n_cols):
            raise MaskError(f"mask cell ({i}, {j}) is outside the {n_rows}x{n_cols} grid")
    for i in range(1, n_rows + 1):
        if not any(cell[0] == i for cell in mask):
            raise MaskError(f"mask leaves row {i} empty")
    for j in range(1, n_cols + 1):
        if not any(cell[1] == j for cell in mask):
            raise MaskError(f"mask leaves column {j} empty")


def random_joint(
    n_rows: int,
    n_cols: int,
    seed: int,
    mask: Optional[Iterable[tuple[int, int]]] = None,
    exact: bool = True,
) -> Joint:
    """Seeded joint with positive entries exactly on the mask (default: all).

    Entries are integer weights normalized by their total; the exact flag
    picks Fractions or floats.  Deterministic for a fixed seed.
    """
    cells = frozenset(mask) if mask is not None else frozenset(
        (i, j) for i in range(1, n_rows + 1) for j in range(1, n_cols + 1)
    )
    _validate_mask(cells, n_rows, n_cols)
    rng = random.Random(seed)
    weights = {cell: rng.randint(1, WEIGHT_CAP) for cell in sorted(cells)}
    total = sum(weights.values())
    grid = tuple(
        tuple(
            (Fraction(weights[(i, j)], total) if exact else weights[(i, j)] / total)
            if (i, j) in cells
            else (Fraction(0) if exact else 0.0)
            for j in range(1, n_cols + 1)
        )
        for i in range(1, n_rows + 1)
    )
    return Joint(grid)


def joint_marginals(j: Joint) -> tuple[tuple[Num, ...], tuple[Num, ...]]:
    """Row sums and column sums."""
    f = tuple(sum(row) for row in j.entries)
    g = tuple(sum(row[c] for row in j.entries) for c in range(j.ncols))
    return f, g


def derive_assessment(j: Joint, cfg: RunConfig = DEFAULT_CONFIG) -> Assessment:
    """Conditional pair induced by the joint: rows of P and of Q normalize
    the joint's rows and columns.  The result has matching supports and is
    coherent by construction."""
    f, g = joint_marginals(j)
    p_rows = [
        [j.at(i, c) / f[i - 1] for c in range(1, j.ncols + 1)]
        for i in range(1, j.nrows + 1)
    ]
    q_rows = [
        [j.at(i, c) / g[c - 1] for i in range(1, j.nrows + 1)]
        for c in range(1, j.ncols + 1)
    ]
    return make_assessment(make_stochastic(p_rows, cfg), make_stochastic(q_rows, cfg))


def roundtrip_check(
    j: Joint, tol: float = 1e-9, cfg: RunConfig = DEFAULT_CONFIG
) -> RoundtripResult:
    """Derive the pair, demand coherence, and match the reconstructed
    marginals against the joint's row and column sums.

    For a block-diagonal joint the solution is a family; the joint's own
    block masses must then lie on the weight simplex and reproduce the sums.
    """
    from dataclasses import replace as _replace

    tol_cfg = cfg if j.exact else _replace(cfg, eps=tol)
    a = derive_assessment(j, tol_cfg)
    report = check_coherence(a, tol_cfg)
    if report.verdict != "coherent":
        return RoundtripResult(False, f"derived assessment judged {report.verdict}")
    expected_f, expected_g = joint_marginals(j)
    solution = solve_marginals(a, tol_cfg)
    if solution.kind == "unique":
        f, g = solution.materialize(cfg=tol_cfg)
    else:
        weights = tuple(
            sum(expected_f[i - 1] for i in block.rows)
            for block in solution.positive_blocks
        )
        if not numbers_close(sum(weights), 1, tol_cfg):
            return RoundtripResult(
                False, f"joint block masses sum to {sum(weights)}, not 1"
            )
        f, g = solution.materialize(weights, cfg=tol_cfg)
    for got, want, label in ((f, expected_f, "f"), (g, expected_g, "g")):
        for idx, (x, y) in enumerate(zip(got, want), start=1):
            if not numbers_close(x, y, tol_cfg):
                return RoundtripResult(
                    False, f"{label}[{idx}] = {x} diverges from joint value {y}"
                )
    return RoundtripResult(True)
