"""Coherence checking and marginal reconstruction for pairs of conditional
probability tables.

Given two row-stochastic matrices P (rows condition on the first variable)
and Q (rows condition on the second), this package decides whether the pair
is a coherent probability assessment in the no-sure-loss sense and, when it
is, reconstructs the marginal distributions of the two variables, reporting
either the unique solution or the family over block weights.
"""

from .coherence import (
    BlockReport,
    CoherenceReport,
    Cycle,
    CycleWitness,
    GuardRefusal,
    PairWitness,
    SaturatedTreePair,
    brute_force_check,
    check_anchor_consistency,
    check_coherence,
    check_tree_ratios,
    check_zero_support_cycles,
    cycle_products,
    iter_cycles,
    saturate_tree_pair,
    tree_restricted_pair,
)
from .errors import (
    AnchorConditionError,
    AssessmentError,
    DimensionMismatchError,
    EmptyMatrixError,
    IncoherentAssessmentError,
    InfeasibleSystemError,
    InputFormatError,
    MaskError,
    MissingPositiveColumnError,
    NegativeEntryError,
    NotStrictlyPositiveError,
    PositivityBoundError,
    RowSumError,
    SpanningTreeError,
    TreeRatioConditionError,
    UndecidedCoherenceError,
    WeightError,
)
from .graph import (
    Block,
    SupportGraph,
    connected_components,
    is_connected,
    spanning_tree,
    support_graph,
    support_pattern_connected,
)
from .marginals import (
    MarginalBlock,
    MarginalSolution,
    combine_block_marginals,
    marginals_from_anchors,
    marginals_from_tree_powers,
    marginals_strictly_positive,
    solve_balance_system,
    solve_marginals,
)
from .matrix import (
    Assessment,
    ProbMatrix,
    anchor_columns,
    has_symmetric_support,
    make_assessment,
    make_stochastic,
    restrict,
)
from .numeric import DEFAULT_CONFIG, RunConfig
from .oracle import (
    Joint,
    RoundtripResult,
    derive_assessment,
    joint_marginals,
    make_joint,
    random_joint,
    roundtrip_check,
)

__version__ = "0.1.0"

__all__ = [
    "AnchorConditionError",
    "Assessment",
    "AssessmentError",
    "Block",
    "BlockReport",
    "CoherenceReport",
    "Cycle",
    "CycleWitness",
    "DEFAULT_CONFIG",
    "DimensionMismatchError",
    "EmptyMatrixError",
    "GuardRefusal",
    "IncoherentAssessmentError",
    "InfeasibleSystemError",
    "InputFormatError",
    "Joint",
    "MarginalBlock",
    "MarginalSolution",
    "MaskError",
    "MissingPositiveColumnError",
    "NegativeEntryError",
    "NotStrictlyPositiveError",
    "PairWitness",
    "PositivityBoundError",
    "ProbMatrix",
    "RoundtripResult",
    "RowSumError",
    "RunConfig",
    "SaturatedTreePair",
    "SpanningTreeError",
    "SupportGraph",
    "TreeRatioConditionError",
    "UndecidedCoherenceError",
    "WeightError",
    "anchor_columns",
    "brute_force_check",
    "check_anchor_consistency",
    "check_coherence",
    "check_tree_ratios",
    "check_zero_support_cycles",
    "combine_block_marginals",
    "connected_components",
    "cycle_products",
    "derive_assessment",
    "has_symmetric_support",
    "is_connected",
    "iter_cycles",
    "joint_marginals",
    "make_assessment",
    "make_joint",
    "make_stochastic",
    "marginals_from_anchors",
    "marginals_from_tree_powers",
    "marginals_strictly_positive",
    "random_joint",
    "restrict",
    "roundtrip_check",
    "saturate_tree_pair",
    "solve_balance_system",
    "solve_marginals",
    "spanning_tree",
    "support_graph",
    "support_pattern_connected",
    "tree_restricted_pair",
]
