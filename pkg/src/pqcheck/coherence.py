"""Coherence checks for a pair of conditional probability tables.

The exact criterion is a family of cycle-product identities: for every choice
of n distinct rows i_1..i_n and n distinct columns j_1..j_n, the forward
product

    p[i_1][j_1] q[j_1][i_2] ... p[i_n][j_n] q[j_n][i_1]

must equal the backward product

    p[i_2][j_1] q[j_1][i_1] ... p[i_1][j_n] q[j_n][i_n].

Checking all cycles is exponential, so two structural fast paths are used
when available.  If both tables have an all-positive column ("anchors" h for
P, k for Q), a single cross identity per cell decides solvability of the
balance system p[i][j] f_i = q[j][i] g_j, and the cycle identities only need
rechecking on the rows and columns whose reconstructed marginal is zero.  If
the supports of P and transposed Q match, each connected block is decided by
powering a spanning-tree restriction of the pair until strictly positive and
comparing entry ratios against p/q.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Iterator, Literal, Optional, Union

from .errors import MissingPositiveColumnError, PositivityBoundError
from .graph import Block, connected_components, spanning_tree, support_graph
from .matrix import Assessment, Grid, restrict
from .numeric import DEFAULT_CONFIG, Num, RunConfig, is_positive, numbers_close

Verdict = Literal["coherent", "incoherent", "undecided"]

METHOD_TREE_POWER = "tree-power"
METHOD_BLOCK_RECURSION = "block-recursion"
METHOD_ANCHOR_RESIDUAL = "anchor-residual"
METHOD_BRUTE_FORCE = "brute-force"


@dataclass(frozen=True)
class Cycle:
    """n distinct row indices paired with n distinct column indices, 1-based."""

    i_seq: tuple[int, ...]
    j_seq: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.i_seq) != len(self.j_seq):
            raise ValueError("row and column sequences must have equal length")
        if not self.i_seq:
            raise ValueError("a cycle needs at least one index pair")
        if len(set(self.i_seq)) != len(self.i_seq) or len(set(self.j_seq)) != len(self.j_seq):
            raise ValueError("cycle indices must be distinct")
        if min(self.i_seq) < 1 or min(self.j_seq) < 1:
            raise ValueError("cycle indices are 1-based")

    @property
    def n(self) -> int:
        return len(self.i_seq)


@dataclass(frozen=True)
class CycleWitness:
    """A cycle whose forward and backward products differ."""

    cycle: Cycle
    lhs: Num
    rhs: Num


@dataclass(frozen=True)
class PairWitness:
    """A cell (i, j) at which a structural identity fails."""

    i: int
    j: int
    lhs: Num
    rhs: Num
    check: str  # "anchor" or "tree-power"


@dataclass(frozen=True)
class GuardRefusal:
    """A size guard refused to enumerate; the verdict stays undecided."""

    reason: str


Witness = Union[CycleWitness, PairWitness]


@dataclass(frozen=True)
class BlockReport:
    rows: tuple[int, ...]
    cols: tuple[int, ...]
    report: "CoherenceReport"


@dataclass(frozen=True)
class CoherenceReport:
    verdict: Verdict
    method: str
    witness: Optional[Witness] = None
    blocks: tuple[BlockReport, ...] = ()
    note: str = ""


@dataclass(frozen=True)
class SaturatedTreePair:
    """Tree restrictions U, V of (P, Q) and their first strictly positive powers.

    T = (UV)^(power-1) U and Z = (VU)^(power-1) V; power never exceeds
    min(rows, cols) for a connected block with matching supports.
    """

    U: Grid
    V: Grid
    T: Grid
    Z: Grid
    power: int


def cycle_products(a: Assessment, cycle: Cycle) -> tuple[Num, Num]:
    """Forward and backward products of p and q entries around a cycle.

    For n = 1 both sides are the same p*q product, so they always agree.
    """
    if max(cycle.i_seq) > a.l or max(cycle.j_seq) > a.m:
        raise IndexError(
            f"cycle indices exceed the {a.l}x{a.m} assessment: "
            f"i={cycle.i_seq} j={cycle.j_seq}"
        )
    n = cycle.n
    i, j = cycle.i_seq, cycle.j_seq
    lhs: Num = 1
    rhs: Num = 1
    for h in range(n):
        nxt = (h + 1) % n
        lhs = lhs * a.p(i[h], j[h]) * a.q(j[h], i[nxt])
        rhs = rhs * a.p(i[nxt], j[h]) * a.q(j[h], i[h])
    return lhs, rhs


def iter_cycles(
    row_indices: tuple[int, ...], col_indices: tuple[int, ...], max_len: Optional[int] = None
) -> Iterator[Cycle]:
    """Canonical cycles of length >= 2 over the given index pools.

    The first row is pinned to the smallest of the chosen row set, which
    removes rotations; reversals are covered because they only swap the two
    product sides.  Length-1 cycles are identities and are skipped.
    """
    top = min(len(row_indices), len(col_indices))
    if max_len is not None:
        top = min(top, max_len)
    rows = tuple(sorted(row_indices))
    cols = tuple(sorted(col_indices))
    for n in range(2, top + 1):
        for row_set in combinations(rows, n):
            head, rest = row_set[0], row_set[1:]
            for tail in permutations(rest):
                i_seq = (head,) + tail
                for col_set in combinations(cols, n):
                    for j_seq in permutations(col_set):
                        yield Cycle(i_seq, j_seq)


def _scan_cycles(
    a: Assessment,
    rows: tuple[int, ...],
    cols: tuple[int, ...],
    cfg: RunConfig,
) -> Optional[CycleWitness]:
    for cycle in iter_cycles(rows, cols):
        lhs, rhs = cycle_products(a, cycle)
        if not numbers_close(lhs, rhs, cfg):
            return CycleWitness(cycle, lhs, rhs)
    return None


def _guard(n_rows: int, n_cols: int, cfg: RunConfig, max_cells: Optional[int]) -> Optional[str]:
    limit = cfg.max_bruteforce_cells if max_cells is None else max_cells
    cells = n_rows * n_cols
    if cells > limit:
        return f"refused: {cells} cells exceed the brute-force limit {limit}"
    if min(n_rows, n_cols) > cfg.max_cycle_length:
        return (
            f"refused: cycle length up to {min(n_rows, n_cols)} exceeds "
            f"the limit {cfg.max_cycle_length}"
        )
    return None


def brute_force_check(
    a: Assessment,
    cfg: RunConfig = DEFAULT_CONFIG,
    *,
    max_cells: Optional[int] = None,
) -> CoherenceReport:
    """Decide coherence by enumerating every cycle identity.

    Refuses oversized instances (verdict ``undecided``) since the number of
    cycles grows super-exponentially; the limits are configurable.
    """
    reason = _guard(a.l, a.m, cfg, max_cells)
    if reason is not None:
        return CoherenceReport("undecided", METHOD_BRUTE_FORCE, note=reason)
    all_rows = tuple(range(1, a.l + 1))
    all_cols = tuple(range(1, a.m + 1))
    witness = _scan_cycles(a, all_rows, all_cols, cfg)
    if witness is not None:
        return CoherenceReport("incoherent", METHOD_BRUTE_FORCE, witness)
    return CoherenceReport("coherent", METHOD_BRUTE_FORCE)


def check_anchor_consistency(
    a: Assessment, h: int, k: int, cfg: RunConfig = DEFAULT_CONFIG
) -> Optional[PairWitness]:
    """Cross identity tying every cell to the anchor columns (h for P, k for Q).

    With column h of P and column k of Q strictly positive, the balance
    system p[i][j] f_i = q[j][i] g_j is solvable exactly when

        p[i][j] q[j][k] p[k][h] q[h][i] == p[i][h] q[h][k] p[k][j] q[j][i]

    holds for every cell (i, j).  Returns the first failing cell.
    """
    if not all(is_positive(a.p(i, h), cfg) for i in range(1, a.l + 1)):
        raise MissingPositiveColumnError(f"column {h} of P is not strictly positive")
    if not all(is_positive(a.q(j, k), cfg) for j in range(1, a.m + 1)):
        raise MissingPositiveColumnError(f"column {k} of Q is not strictly positive")
    for i in range(1, a.l + 1):
        for j in range(1, a.m + 1):
            lhs = a.p(i, j) * a.q(j, k) * a.p(k, h) * a.q(h, i)
            rhs = a.p(i, h) * a.q(h, k) * a.p(k, j) * a.q(j, i)
            if not numbers_close(lhs, rhs, cfg):
                return PairWitness(i, j, lhs, rhs, check="anchor")
    return None


def check_zero_support_cycles(
    a: Assessment,
    f: tuple[Num, ...],
    g: tuple[Num, ...],
    cfg: RunConfig = DEFAULT_CONFIG,
    *,
    max_cells: Optional[int] = None,
) -> Union[CycleWitness, GuardRefusal, None]:
    """Recheck the cycle identities on the zero-marginal rows and columns.

    Once the balance system is solvable with marginals (f, g), coherence only
    hinges on cycles confined to rows with f_i = 0 and columns with g_j = 0;
    cycles through a positive-marginal event are already settled.
    """
    zero_rows = tuple(i for i in range(1, a.l + 1) if not is_positive(f[i - 1], cfg))
    zero_cols = tuple(j for j in range(1, a.m + 1) if not is_positive(g[j - 1], cfg))
    if not zero_rows or not zero_cols:
        return None
    reason = _guard(len(zero_rows), len(zero_cols), cfg, max_cells)
    if reason is not None:
        return GuardRefusal(f"zero-marginal recheck {reason}")
    return _scan_cycles(a, zero_rows, zero_cols, cfg)


def _zero_like(a: Assessment) -> Num:
    from fractions import Fraction

    return Fraction(0) if a.exact else 0.0


def tree_restricted_pair(
    a: Assessment, tree: frozenset[tuple[int, int]]
) -> tuple[Grid, Grid]:
    """Copies of P and Q zeroed outside a shared spanning tree.

    U keeps p[i][j] on tree edges; V keeps q[j][i] at the transposed
    positions, so both restrictions stay connected by construction.
    """
    zero = _zero_like(a)
    U = tuple(
        tuple(a.p(i, j) if (i, j) in tree else zero for j in range(1, a.m + 1))
        for i in range(1, a.l + 1)
    )
    V = tuple(
        tuple(a.q(j, i) if (i, j) in tree else zero for i in range(1, a.l + 1))
        for j in range(1, a.m + 1)
    )
    return U, V


def _matmul(A: Grid, B: Grid) -> Grid:
    inner = len(B)
    return tuple(
        tuple(sum(row[t] * B[t][c] for t in range(inner)) for c in range(len(B[0])))
        for row in A
    )


def _strictly_positive(M: Grid, cfg: RunConfig) -> bool:
    return all(is_positive(x, cfg) for row in M for x in row)


def saturate_tree_pair(U: Grid, V: Grid, cfg: RunConfig = DEFAULT_CONFIG) -> SaturatedTreePair:
    """Raise the tree pair until both directions are strictly positive.

    Iterates T = (UV)^(power-1) U and Z = (VU)^(power-1) V for power = 1, 2,
    ... and stops at the first strictly positive pair.  For a connected block
    the bound min(rows, cols) is guaranteed; exceeding it is an error.
    """
    n_rows, n_cols = len(U), len(U[0])
    bound = min(n_rows, n_cols)
    UV = _matmul(U, V)
    VU = _matmul(V, U)
    T, Z = U, V
    for power in range(1, bound + 1):
        if power > 1:
            T = _matmul(UV, T)
            Z = _matmul(VU, Z)
        if _strictly_positive(T, cfg) and _strictly_positive(Z, cfg):
            return SaturatedTreePair(U, V, T, Z, power)
    raise PositivityBoundError(
        f"no strictly positive power within min(l, m) = {bound}; "
        "the block is not connected with matching supports"
    )


def check_tree_ratios(
    a: Assessment, tz: SaturatedTreePair, cfg: RunConfig = DEFAULT_CONFIG
) -> Optional[PairWitness]:
    """Compare saturated-power ratios with the table ratios, cross-multiplied.

    The balance system on a connected block with matching supports is
    solvable exactly when t[i][j] / z[j][i] == p[i][j] / q[j][i] wherever
    p[i][j] > 0; the comparison is done as t*q == z*p to stay division-free.
    """
    for i in range(1, a.l + 1):
        for j in range(1, a.m + 1):
            if not is_positive(a.p(i, j), cfg):
                continue
            lhs = tz.T[i - 1][j - 1] * a.q(j, i)
            rhs = tz.Z[j - 1][i - 1] * a.p(i, j)
            if not numbers_close(lhs, rhs, cfg):
                return PairWitness(i, j, lhs, rhs, check="tree-power")
    return None


def _translate_pair(w: PairWitness, rows: tuple[int, ...], cols: tuple[int, ...]) -> PairWitness:
    return PairWitness(rows[w.i - 1], cols[w.j - 1], w.lhs, w.rhs, w.check)


def check_block_tree_ratios(
    a: Assessment, block: Block, cfg: RunConfig = DEFAULT_CONFIG
) -> Optional[PairWitness]:
    """Run the tree-power test on one connected block; witness in global indices."""
    sub = restrict(a, block.rows, block.cols)
    tree = spanning_tree(support_graph(sub, cfg), Block(
        tuple(range(1, sub.l + 1)), tuple(range(1, sub.m + 1))
    ))
    U, V = tree_restricted_pair(sub, tree)
    tz = saturate_tree_pair(U, V, cfg)
    witness = check_tree_ratios(sub, tz, cfg)
    if witness is None:
        return None
    return _translate_pair(witness, block.rows, block.cols)


def check_coherence(a: Assessment, cfg: RunConfig = DEFAULT_CONFIG) -> CoherenceReport:
    """Decide coherence, picking the cheapest decisive route.

    1. Matching supports: split into connected blocks and run the tree-power
       ratio test on each; the pair is coherent exactly when every block is.
    2. Otherwise, with anchor columns available: one cross identity per cell
       decides solvability of the balance system, then the cycle identities
       are rechecked on the zero-marginal rows and columns.
    3. Otherwise fall back to full cycle enumeration under the size guard.
    """
    from .matrix import anchor_columns, has_symmetric_support

    if has_symmetric_support(a, cfg):
        blocks = connected_components(support_graph(a, cfg))
        reports = []
        first_witness: Optional[Witness] = None
        for block in blocks:
            witness = check_block_tree_ratios(a, block, cfg)
            verdict: Verdict = "coherent" if witness is None else "incoherent"
            reports.append(BlockReport(block.rows, block.cols, CoherenceReport(verdict, METHOD_TREE_POWER, witness)))
            if witness is not None and first_witness is None:
                first_witness = witness
        if len(blocks) == 1:
            return reports[0].report
        verdict = "coherent" if first_witness is None else "incoherent"
        return CoherenceReport(verdict, METHOD_BLOCK_RECURSION, first_witness, tuple(reports))

    anchors = anchor_columns(a, cfg)
    if anchors is not None:
        h, k = anchors
        witness = check_anchor_consistency(a, h, k, cfg)
        if witness is not None:
            return CoherenceReport("incoherent", METHOD_ANCHOR_RESIDUAL, witness)
        # Zero-marginal events are exactly those missing from the anchor
        # columns: f_i > 0 only if q[h][i] > 0, g_j > 0 only if p[k][j] > 0.
        zero_rows = tuple(i for i in range(1, a.l + 1) if not is_positive(a.q(h, i), cfg))
        zero_cols = tuple(j for j in range(1, a.m + 1) if not is_positive(a.p(k, j), cfg))
        if zero_rows and zero_cols:
            reason = _guard(len(zero_rows), len(zero_cols), cfg, None)
            if reason is not None:
                return CoherenceReport(
                    "undecided", METHOD_ANCHOR_RESIDUAL, note=f"zero-marginal recheck {reason}"
                )
            cycle_witness = _scan_cycles(a, zero_rows, zero_cols, cfg)
            if cycle_witness is not None:
                return CoherenceReport("incoherent", METHOD_ANCHOR_RESIDUAL, cycle_witness)
        return CoherenceReport("coherent", METHOD_ANCHOR_RESIDUAL)

    return brute_force_check(a, cfg)
