"""Marginal reconstruction for a pair of conditional probability tables.

Every solver targets the balance system

    p[i][j] * f_i = q[j][i] * g_j   for all i, j,
    sum(f) = sum(g) = 1,            f, g >= 0,

whose solutions are the marginal distributions of the two underlying
variables.  Closed forms cover the structured cases; a ratio-propagation
solver handles arbitrary supports and reports the full solution family when
the support splits into independent blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Literal, Optional, Sequence

from .coherence import (
    SaturatedTreePair,
    check_anchor_consistency,
    check_coherence,
    check_tree_ratios,
    saturate_tree_pair,
    tree_restricted_pair,
)
from .errors import (
    AnchorConditionError,
    IncoherentAssessmentError,
    InfeasibleSystemError,
    MissingPositiveColumnError,
    NotStrictlyPositiveError,
    TreeRatioConditionError,
    UndecidedCoherenceError,
    WeightError,
)
from .graph import Block, connected_components, spanning_tree, support_graph
from .matrix import Assessment, anchor_columns, has_symmetric_support, restrict
from .numeric import DEFAULT_CONFIG, Num, RunConfig, is_positive, numbers_close

Kind = Literal["unique", "family", "infeasible"]


@dataclass(frozen=True)
class MarginalBlock:
    """One block of the solution: indices, per-block normalized parts, and
    whether the block can carry positive weight at all."""

    rows: tuple[int, ...]
    cols: tuple[int, ...]
    f_part: tuple[Num, ...]
    g_part: tuple[Num, ...]
    positive: bool


@dataclass(frozen=True)
class MarginalSolution:
    """Either a unique marginal pair or a family over block weights.

    ``blocks`` lists positive-capable blocks first by smallest row index,
    then blocks forced to weight zero.  ``chosen_weights`` aligns with the
    positive blocks and records the weights used for the default
    materialization.
    """

    kind: Kind
    n_rows: int
    n_cols: int
    blocks: tuple[MarginalBlock, ...]
    weight_freedom: int
    chosen_weights: Optional[tuple[Num, ...]]
    warnings: tuple[str, ...] = ()

    @property
    def positive_blocks(self) -> tuple[MarginalBlock, ...]:
        return tuple(b for b in self.blocks if b.positive)

    def materialize(
        self, weights: Optional[Sequence[Num]] = None, cfg: RunConfig = DEFAULT_CONFIG
    ) -> tuple[tuple[Num, ...], tuple[Num, ...]]:
        """Concrete (f, g) vectors for one weight choice over the positive blocks."""
        if self.kind == "infeasible":
            raise InfeasibleSystemError(self)
        pos = self.positive_blocks
        if weights is None:
            weights = self.chosen_weights
        weights = _checked_weights(weights, len(pos), cfg)
        zero: Num = Fraction(0) if _blocks_exact(self.blocks) else 0.0
        f: list[Num] = [zero] * self.n_rows
        g: list[Num] = [zero] * self.n_cols
        for block, w in zip(pos, weights):
            for idx, i in enumerate(block.rows):
                f[i - 1] = w * block.f_part[idx]
            for idx, j in enumerate(block.cols):
                g[j - 1] = w * block.g_part[idx]
        return tuple(f), tuple(g)

    def with_warning(self, message: str) -> "MarginalSolution":
        return replace(self, warnings=self.warnings + (message,))


def _blocks_exact(blocks: tuple[MarginalBlock, ...]) -> bool:
    for b in blocks:
        for x in b.f_part + b.g_part:
            return isinstance(x, (int, Fraction))
    return True


def _checked_weights(
    weights: Optional[Sequence[Num]], count: int, cfg: RunConfig
) -> tuple[Num, ...]:
    if weights is None:
        weights = tuple(Fraction(1, count) for _ in range(count))
    weights = tuple(weights)
    if len(weights) != count:
        raise WeightError(f"expected {count} weights, got {len(weights)}")
    if any(w < 0 for w in weights):
        raise WeightError("weights must be nonnegative")
    if not numbers_close(sum(weights), 1, cfg):
        raise WeightError(f"weights sum to {sum(weights)}, expected 1")
    return weights


def marginals_from_anchors(
    a: Assessment,
    h: Optional[int] = None,
    k: Optional[int] = None,
    cfg: RunConfig = DEFAULT_CONFIG,
) -> tuple[tuple[Num, ...], tuple[Num, ...]]:
    """Closed-form marginals from an all-positive column pair.

    With column h of P strictly positive, f_i is proportional to
    q[h][i] / p[i][h]; with column k of Q strictly positive, g_j is
    proportional to p[k][j] / q[j][k].  The anchor cross identity is verified
    first, so the returned pair always solves the balance system.
    """
    if h is None or k is None:
        found = anchor_columns(a, cfg)
        if found is None:
            raise MissingPositiveColumnError(
                "no all-positive column pair exists for this assessment"
            )
        h, k = found
    witness = check_anchor_consistency(a, h, k, cfg)
    if witness is not None:
        raise AnchorConditionError(witness)
    f_raw = tuple(a.q(h, i) / a.p(i, h) for i in range(1, a.l + 1))
    g_raw = tuple(a.p(k, j) / a.q(j, k) for j in range(1, a.m + 1))
    f_total = sum(f_raw)
    g_total = sum(g_raw)
    return tuple(x / f_total for x in f_raw), tuple(x / g_total for x in g_raw)


def marginals_strictly_positive(
    a: Assessment, cfg: RunConfig = DEFAULT_CONFIG
) -> tuple[tuple[Num, ...], tuple[Num, ...]]:
    """Marginals for strictly positive tables: f_i = 1 / sum_h p[i][h]/q[h][i].

    Equivalent to the anchor closed form for any anchor choice; stated as a
    row (column) harmonic sum so no normalization pass is needed.
    """
    if not (a.P.is_strictly_positive(cfg) and a.Q.is_strictly_positive(cfg)):
        raise NotStrictlyPositiveError("both tables must be strictly positive")
    witness = check_anchor_consistency(a, 1, 1, cfg)
    if witness is not None:
        raise AnchorConditionError(witness)
    f = tuple(
        1 / sum(a.p(i, h) / a.q(h, i) for h in range(1, a.m + 1)) for i in range(1, a.l + 1)
    )
    g = tuple(
        1 / sum(a.q(j, k) / a.p(k, j) for k in range(1, a.l + 1)) for j in range(1, a.m + 1)
    )
    return f, g


def marginals_from_tree_powers(
    a: Assessment,
    tz: Optional[SaturatedTreePair] = None,
    cfg: RunConfig = DEFAULT_CONFIG,
) -> tuple[tuple[Num, ...], tuple[Num, ...]]:
    """Marginals for a connected pair with matching supports.

    Uses the saturated tree powers T and Z: f_i = 1 / sum_h t[i][h]/z[h][i]
    and g_j = 1 / sum_k z[j][k]/t[k][j], after verifying the ratio identity.
    The result is strictly positive and unique.
    """
    if tz is None:
        g_sup = support_graph(a, cfg)
        tree = spanning_tree(
            g_sup, Block(tuple(range(1, a.l + 1)), tuple(range(1, a.m + 1)))
        )
        U, V = tree_restricted_pair(a, tree)
        tz = saturate_tree_pair(U, V, cfg)
    witness = check_tree_ratios(a, tz, cfg)
    if witness is not None:
        raise TreeRatioConditionError(witness)
    T, Z = tz.T, tz.Z
    f = tuple(
        1 / sum(T[i][h] / Z[h][i] for h in range(a.m)) for i in range(a.l)
    )
    g = tuple(
        1 / sum(Z[j][k] / T[k][j] for k in range(a.l)) for j in range(a.m)
    )
    return f, g


def combine_block_marginals(
    parts: Sequence[MarginalBlock],
    weights: Optional[Sequence[Num]] = None,
    *,
    n_rows: int,
    n_cols: int,
    cfg: RunConfig = DEFAULT_CONFIG,
) -> MarginalSolution:
    """Assemble per-block marginals into one solution over block weights.

    Any nonnegative weight vector summing to one, vertices included, yields a
    valid solution of the balance system; the stored weights (uniform by
    default) only pick the materialized representative.
    """
    parts = tuple(parts)
    if not parts:
        raise WeightError("at least one block is required")
    chosen = _checked_weights(weights, len(parts), cfg)
    if not _blocks_exact(parts):
        chosen = tuple(float(w) for w in chosen)
    kind: Kind = "unique" if len(parts) == 1 else "family"
    return MarginalSolution(
        kind=kind,
        n_rows=n_rows,
        n_cols=n_cols,
        blocks=parts,
        weight_freedom=len(parts) - 1,
        chosen_weights=chosen,
    )


def _propagate_cluster(
    a: Assessment,
    g_sup,
    rows: tuple[int, ...],
    cols: tuple[int, ...],
    cfg: RunConfig,
) -> Optional[tuple[dict[int, Num], dict[int, Num]]]:
    """Fix the ratio ray of one both-positive cluster from a unit seed.

    Returns per-index values, or None when a non-tree edge contradicts the
    propagated ratios (the cluster then only admits the zero solution).
    """
    one: Num = Fraction(1) if a.exact else 1.0
    f_val: dict[int, Num] = {}
    g_val: dict[int, Num] = {}
    row_set, col_set = set(rows), set(cols)
    seed = min(rows)
    f_val[seed] = one
    frontier: list[tuple[str, int]] = [("r", seed)]
    while frontier:
        side, idx = frontier.pop()
        if side == "r":
            for j in g_sup.row_neighbors(idx, both=True):
                if j in col_set and j not in g_val:
                    g_val[j] = f_val[idx] * a.p(idx, j) / a.q(j, idx)
                    frontier.append(("c", j))
        else:
            for i in g_sup.col_neighbors(idx, both=True):
                if i in row_set and i not in f_val:
                    f_val[i] = g_val[idx] * a.q(idx, i) / a.p(i, idx)
                    frontier.append(("r", i))
    # Re-verify every in-cluster constraint; non-tree edges can conflict.
    for i in rows:
        for j in g_sup.row_neighbors(i, both=True):
            if j in col_set and not numbers_close(
                a.p(i, j) * f_val[i], a.q(j, i) * g_val[j], cfg
            ):
                return None
    return f_val, g_val


def solve_balance_system(a: Assessment, cfg: RunConfig = DEFAULT_CONFIG) -> MarginalSolution:
    """General solver for the balance system by ratio propagation.

    An edge positive on one side only forces that side's variable to zero,
    and zeros spread across both-positive edges.  The remaining nodes split
    into clusters linked by both-positive edges; each cluster's ratios are
    propagated from a unit seed and re-verified, a conflicting cluster being
    demoted to weight zero.  Surviving clusters each normalize to a
    probability ray, and the full solution set is the simplex over their
    weights.  With no surviving cluster the system is infeasible.
    """
    g_sup = support_graph(a, cfg)
    zero_rows: set[int] = set()
    zero_cols: set[int] = set()
    for i, j in g_sup.edges:
        p_pos, q_pos = g_sup.flags(i, j)
        if p_pos and not q_pos:
            zero_rows.add(i)
        if q_pos and not p_pos:
            zero_cols.add(j)
    # Zeros propagate across both-positive edges.
    stack: list[tuple[str, int]] = [("r", i) for i in sorted(zero_rows)]
    stack += [("c", j) for j in sorted(zero_cols)]
    while stack:
        side, idx = stack.pop()
        if side == "r":
            for j in g_sup.row_neighbors(idx, both=True):
                if j not in zero_cols:
                    zero_cols.add(j)
                    stack.append(("c", j))
        else:
            for i in g_sup.col_neighbors(idx, both=True):
                if i not in zero_rows:
                    zero_rows.add(i)
                    stack.append(("r", i))

    # Clusters: components of the both-positive subgraph on unforced nodes.
    live_rows = [i for i in range(1, a.l + 1) if i not in zero_rows]
    seen: set[int] = set()
    clusters: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
    for start in live_rows:
        if start in seen:
            continue
        rows, cols = {start}, set()
        walk: list[tuple[str, int]] = [("r", start)]
        while walk:
            side, idx = walk.pop()
            if side == "r":
                for j in g_sup.row_neighbors(idx, both=True):
                    if j not in zero_cols and j not in cols:
                        cols.add(j)
                        walk.append(("c", j))
            else:
                for i in g_sup.col_neighbors(idx, both=True):
                    if i not in zero_rows and i not in rows:
                        rows.add(i)
                        walk.append(("r", i))
        seen |= rows
        clusters.append((tuple(sorted(rows)), tuple(sorted(cols))))

    warnings: list[str] = []
    blocks: list[MarginalBlock] = []
    demoted_rows: set[int] = set()
    demoted_cols: set[int] = set()
    zero: Num = Fraction(0) if a.exact else 0.0
    for rows, cols in clusters:
        ray = _propagate_cluster(a, g_sup, rows, cols, cfg)
        if ray is None:
            demoted_rows |= set(rows)
            demoted_cols |= set(cols)
            warnings.append(
                f"rows {list(rows)} and columns {list(cols)} admit only the zero solution"
            )
            blocks.append(
                MarginalBlock(rows, cols, (zero,) * len(rows), (zero,) * len(cols), False)
            )
            continue
        f_val, g_val = ray
        total = sum(f_val.values())
        f_part = tuple(f_val[i] / total for i in rows)
        g_part = tuple(g_val[j] / total for j in cols)
        blocks.append(MarginalBlock(rows, cols, f_part, g_part, True))

    dead_rows = tuple(sorted(zero_rows))
    dead_cols = tuple(sorted(zero_cols))
    if dead_rows or dead_cols:
        blocks.append(
            MarginalBlock(
                dead_rows, dead_cols, (zero,) * len(dead_rows), (zero,) * len(dead_cols), False
            )
        )

    positive_count = sum(1 for b in blocks if b.positive)
    if positive_count == 0:
        return MarginalSolution(
            kind="infeasible",
            n_rows=a.l,
            n_cols=a.m,
            blocks=tuple(blocks),
            weight_freedom=0,
            chosen_weights=None,
            warnings=tuple(warnings),
        )
    if a.exact:
        chosen: tuple[Num, ...] = tuple(
            Fraction(1, positive_count) for _ in range(positive_count)
        )
    else:
        chosen = tuple(1.0 / positive_count for _ in range(positive_count))
    kind: Kind = "unique" if positive_count == 1 else "family"
    return MarginalSolution(
        kind=kind,
        n_rows=a.l,
        n_cols=a.m,
        blocks=tuple(blocks),
        weight_freedom=positive_count - 1,
        chosen_weights=chosen,
        warnings=tuple(warnings),
    )


def _single_block_solution(
    a: Assessment, f: tuple[Num, ...], g: tuple[Num, ...]
) -> MarginalSolution:
    one: Num = Fraction(1) if a.exact else 1.0
    block = MarginalBlock(
        tuple(range(1, a.l + 1)), tuple(range(1, a.m + 1)), f, g, True
    )
    return MarginalSolution(
        kind="unique",
        n_rows=a.l,
        n_cols=a.m,
        blocks=(block,),
        weight_freedom=0,
        chosen_weights=(one,),
    )


def solve_marginals(a: Assessment, cfg: RunConfig = DEFAULT_CONFIG) -> MarginalSolution:
    """Reconstruct marginals as a coherent extension of the assessment.

    Coherence is established first; an incoherent (or size-guard undecided)
    assessment raises unless ``allow_incoherent`` is set, in which case the
    balance-system solution is returned with a warning.  Coherent assessments
    route to the cheapest applicable form: the strictly positive closed form,
    per-block tree powers combined over the block weight simplex, the anchor
    closed form, or the general propagation solver.
    """
    report = check_coherence(a, cfg)
    if report.verdict != "coherent":
        if not cfg.allow_incoherent:
            if report.verdict == "incoherent":
                raise IncoherentAssessmentError(report)
            raise UndecidedCoherenceError(report)
        solution = solve_balance_system(a, cfg)
        if solution.kind == "infeasible":
            raise InfeasibleSystemError(solution)
        if report.verdict == "incoherent":
            return solution.with_warning(
                "assessment is incoherent; the solution satisfies the balance system only"
            )
        return solution.with_warning(
            "coherence undecided under the size guard; the solution satisfies the "
            "balance system only"
        )

    if a.P.is_strictly_positive(cfg) and a.Q.is_strictly_positive(cfg):
        f, g = marginals_strictly_positive(a, cfg)
        return _single_block_solution(a, f, g)
    if has_symmetric_support(a, cfg):
        blocks = connected_components(support_graph(a, cfg))
        parts = []
        for block in blocks:
            sub = restrict(a, block.rows, block.cols)
            f, g = marginals_from_tree_powers(sub, None, cfg)
            parts.append(MarginalBlock(block.rows, block.cols, f, g, True))
        return combine_block_marginals(parts, None, n_rows=a.l, n_cols=a.m, cfg=cfg)
    if anchor_columns(a, cfg) is not None:
        f, g = marginals_from_anchors(a, None, None, cfg)
        return _single_block_solution(a, f, g)
    solution = solve_balance_system(a, cfg)
    if solution.kind == "infeasible":
        raise InfeasibleSystemError(solution)
    return solution
