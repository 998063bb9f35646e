"""Row-stochastic matrices and assessment pairs.

An assessment is a pair of conditional probability tables: ``P`` holds
``p[i][j] = Prob(B_j | A_i)`` over ``l`` row events and ``m`` column events,
and ``Q`` holds ``q[j][i] = Prob(A_i | B_j)``.  All indices exposed by this
package are 1-based to match standard matrix notation; raw entry grids are
ordinary 0-based tuples.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import (
    DimensionMismatchError,
    EmptyMatrixError,
    NegativeEntryError,
    RowSumError,
)
from .numeric import DEFAULT_CONFIG, Num, RunConfig, coerce_entry, is_exact, is_positive, numbers_close

Grid = tuple[tuple[Num, ...], ...]


@dataclass(frozen=True)
class ProbMatrix:
    """Immutable grid whose rows each sum to one."""

    entries: Grid

    @property
    def nrows(self) -> int:
        return len(self.entries)

    @property
    def ncols(self) -> int:
        return len(self.entries[0])

    @property
    def exact(self) -> bool:
        return is_exact(self.entries[0][0])

    def at(self, i: int, j: int) -> Num:
        """Entry at 1-based position (i, j)."""
        return self.entries[i - 1][j - 1]

    def row(self, i: int) -> tuple[Num, ...]:
        return self.entries[i - 1]

    def column(self, j: int) -> tuple[Num, ...]:
        return tuple(row[j - 1] for row in self.entries)

    def support(self, cfg: RunConfig = DEFAULT_CONFIG) -> frozenset[tuple[int, int]]:
        """1-based positions of the positive entries."""
        return frozenset(
            (i, j)
            for i in range(1, self.nrows + 1)
            for j in range(1, self.ncols + 1)
            if is_positive(self.at(i, j), cfg)
        )

    def is_strictly_positive(self, cfg: RunConfig = DEFAULT_CONFIG) -> bool:
        return all(is_positive(x, cfg) for row in self.entries for x in row)


@dataclass(frozen=True)
class Assessment:
    """The pair (P, Q); P is l x m and Q is m x l."""

    P: ProbMatrix
    Q: ProbMatrix

    @property
    def l(self) -> int:
        return self.P.nrows

    @property
    def m(self) -> int:
        return self.P.ncols

    @property
    def exact(self) -> bool:
        return self.P.exact

    def p(self, i: int, j: int) -> Num:
        """Prob(B_j | A_i), 1-based."""
        return self.P.at(i, j)

    def q(self, j: int, i: int) -> Num:
        """Prob(A_i | B_j), 1-based."""
        return self.Q.at(j, i)


def make_stochastic(rows: Sequence[Sequence[Num]], cfg: RunConfig = DEFAULT_CONFIG) -> ProbMatrix:
    """Validate a grid and build a row-stochastic matrix.

    Entries are coerced to a homogeneous mode: exact rationals when every
    entry is an int or Fraction, floats otherwise.  Row sums must equal one,
    exactly in rational mode and within the configured tolerance for floats.
    """
    if not rows or not rows[0]:
        raise EmptyMatrixError("matrix must have at least one row and one column")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError("all rows must have the same length")
    exact = all(is_exact(x) for r in rows for x in r)
    grid = tuple(tuple(coerce_entry(x, exact) for x in r) for r in rows)
    for i, r in enumerate(grid, start=1):
        for j, x in enumerate(r, start=1):
            if x < 0:
                raise NegativeEntryError(i, j, x)
        total = sum(r)
        if not numbers_close(total, 1, cfg):
            raise RowSumError(i, total)
    return ProbMatrix(grid)


def make_assessment(P: ProbMatrix, Q: ProbMatrix) -> Assessment:
    """Pair two validated tables, checking that dimensions are transposed."""
    if P.ncols != Q.nrows or P.nrows != Q.ncols:
        raise DimensionMismatchError(P.nrows, P.ncols, Q.nrows, Q.ncols)
    if P.exact != Q.exact:
        raise TypeError("P and Q must use the same arithmetic mode")
    return Assessment(P, Q)


def anchor_columns(a: Assessment, cfg: RunConfig = DEFAULT_CONFIG) -> Optional[tuple[int, int]]:
    """Smallest column of P positive in every row, and likewise for Q.

    Returns ``(h, k)`` where column ``h`` of P and column ``k`` of Q are
    strictly positive, or ``None`` when either side has no such column.
    """
    h = next(
        (j for j in range(1, a.m + 1) if all(is_positive(a.p(i, j), cfg) for i in range(1, a.l + 1))),
        None,
    )
    if h is None:
        return None
    k = next(
        (i for i in range(1, a.l + 1) if all(is_positive(a.q(j, i), cfg) for j in range(1, a.m + 1))),
        None,
    )
    if k is None:
        return None
    return h, k


def has_symmetric_support(a: Assessment, cfg: RunConfig = DEFAULT_CONFIG) -> bool:
    """True when p[i][j] > 0 exactly where q[j][i] > 0."""
    return all(
        is_positive(a.p(i, j), cfg) == is_positive(a.q(j, i), cfg)
        for i in range(1, a.l + 1)
        for j in range(1, a.m + 1)
    )


def restrict(a: Assessment, rows: Sequence[int], cols: Sequence[int]) -> Assessment:
    """Sub-assessment on the given 1-based row and column sets.

    Intended for blocks of the support graph, where every positive entry of a
    kept row or column lands inside the block; validation is skipped.
    """
    p_grid = tuple(tuple(a.p(i, j) for j in cols) for i in rows)
    q_grid = tuple(tuple(a.q(j, i) for i in rows) for j in cols)
    return Assessment(ProbMatrix(p_grid), ProbMatrix(q_grid))
