"""Exception types raised by the assessment toolkit."""

from __future__ import annotations


class AssessmentError(Exception):
    """Base class for every domain error raised by this package."""


class EmptyMatrixError(AssessmentError):
    """The input grid has no rows or no columns."""


class NegativeEntryError(AssessmentError):
    def __init__(self, row: int, col: int, value) -> None:
        super().__init__(f"entry at row {row}, column {col} is negative: {value}")
        self.row = row
        self.col = col
        self.value = value


class RowSumError(AssessmentError):
    def __init__(self, row: int, total) -> None:
        super().__init__(f"row {row} sums to {total}, expected 1")
        self.row = row
        self.total = total


class DimensionMismatchError(AssessmentError):
    def __init__(self, p_rows: int, p_cols: int, q_rows: int, q_cols: int) -> None:
        super().__init__(
            f"P is {p_rows}x{p_cols} so Q must be {p_cols}x{p_rows}, got {q_rows}x{q_cols}"
        )
        self.p_rows, self.p_cols = p_rows, p_cols
        self.q_rows, self.q_cols = q_rows, q_cols


class SpanningTreeError(AssessmentError):
    """Edges positive on both sides do not connect the requested block."""


class MissingPositiveColumnError(AssessmentError):
    """No column of P (or of Q) is positive in every row."""


class PositivityBoundError(AssessmentError):
    """Tree-power saturation did not reach strict positivity within its bound.

    Signals an internal error or a call on a pair that is not connected with
    matching supports.
    """


class AnchorConditionError(AssessmentError):
    """The anchor-column cross identity fails, so the balance system has no
    solution and no marginals can be emitted from the closed form."""

    def __init__(self, witness) -> None:
        super().__init__(
            f"anchor identity fails at row {witness.i}, column {witness.j}: "
            f"{witness.lhs} != {witness.rhs}"
        )
        self.witness = witness


class TreeRatioConditionError(AssessmentError):
    """The tree-power ratio identity fails, so the balance system has no
    solution on this connected block."""

    def __init__(self, witness) -> None:
        super().__init__(
            f"tree-power ratio fails at row {witness.i}, column {witness.j}: "
            f"{witness.lhs} != {witness.rhs}"
        )
        self.witness = witness


class NotStrictlyPositiveError(AssessmentError):
    """An operation that needs strictly positive tables got a zero entry."""


class WeightError(AssessmentError):
    """Block weights must be nonnegative and sum to one."""


class MaskError(AssessmentError):
    """A support mask must cover every row and every column at least once."""


class IncoherentAssessmentError(AssessmentError):
    """Marginals were requested for an incoherent assessment."""

    def __init__(self, report) -> None:
        super().__init__("assessment is incoherent; pass allow_incoherent to override")
        self.report = report


class UndecidedCoherenceError(AssessmentError):
    """Coherence could not be decided under the configured size guard."""

    def __init__(self, report) -> None:
        super().__init__("coherence undecided under the size guard")
        self.report = report


class InfeasibleSystemError(AssessmentError):
    """The balance system admits no normalized nonnegative solution."""

    def __init__(self, solution=None) -> None:
        super().__init__("the balance system has no solution")
        self.solution = solution


class InputFormatError(AssessmentError):
    """Malformed input document handed to the command line interface."""
