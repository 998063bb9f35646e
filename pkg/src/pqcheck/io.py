"""JSON input parsing and report serialization for the command line.

Input documents look like ``{"P": [[...]], "Q": [[...]]}`` with entries given
as numbers or "a/b" fraction strings.  Exact mode requires every entry to be
an integer or a string; plain JSON floats force float mode.  The mode is
resolved per run: exact when all entries are exact and the table is small
enough, float otherwise.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .coherence import (
    BlockReport,
    CoherenceReport,
    CycleWitness,
    PairWitness,
)
from .errors import AssessmentError, InputFormatError
from .marginals import MarginalSolution
from .matrix import Assessment, make_assessment, make_stochastic
from .numeric import (
    EXACT_CELL_LIMIT,
    FLOAT,
    RATIONAL,
    Num,
    RunConfig,
    format_number,
)


def _entry_is_exact(x: Any) -> bool:
    return (isinstance(x, int) and not isinstance(x, bool)) or isinstance(x, str)


def _convert_entry(x: Any, exact: bool, where: str) -> Num:
    if isinstance(x, bool) or not isinstance(x, (int, float, str)):
        raise InputFormatError(f"{where}: entry {x!r} is not a number or 'a/b' string")
    if isinstance(x, str):
        try:
            value = Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputFormatError(f"{where}: cannot parse entry {x!r}") from exc
        return value if exact else float(value)
    if exact:
        if isinstance(x, float):
            raise InputFormatError(
                f"{where}: entry {x!r} is a float; exact mode needs integers or 'a/b' strings"
            )
        return Fraction(x)
    return float(x)


def _matrix_grid(raw: Any, name: str) -> list[list[Any]]:
    if not isinstance(raw, list) or not raw or not all(isinstance(r, list) for r in raw):
        raise InputFormatError(f"matrix {name} must be a non-empty list of rows")
    return raw


def load_assessment(text: str, cfg: RunConfig, force_exact: bool) -> tuple[Assessment, RunConfig]:
    """Parse an input document and resolve the arithmetic mode.

    Returns the assessment together with the config updated to the resolved
    mode.  Raises InputFormatError with a pointed message on any defect.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict) or "P" not in data or "Q" not in data:
        raise InputFormatError('input must be a JSON object with "P" and "Q" keys')
    raw_p = _matrix_grid(data["P"], "P")
    raw_q = _matrix_grid(data["Q"], "Q")

    cells = sum(len(r) for r in raw_p)
    all_exact = all(_entry_is_exact(x) for r in raw_p + raw_q for x in r)
    if force_exact and not all_exact:
        for name, raw in (("P", raw_p), ("Q", raw_q)):
            for i, row in enumerate(raw, start=1):
                for j, x in enumerate(row, start=1):
                    if not _entry_is_exact(x):
                        raise InputFormatError(
                            f"matrix {name}, row {i}, column {j}: entry {x!r} is not exact; "
                            'exact mode needs integers or "a/b" strings'
                        )
    exact = force_exact or (all_exact and cells <= EXACT_CELL_LIMIT)

    def build(name: str, raw: list[list[Any]]):
        grid = [
            [
                _convert_entry(x, exact, f"matrix {name}, row {i}, column {j}")
                for j, x in enumerate(row, start=1)
            ]
            for i, row in enumerate(raw, start=1)
        ]
        try:
            return make_stochastic(grid, cfg)
        except AssessmentError as exc:
            raise InputFormatError(f"matrix {name}: {exc}") from exc

    P = build("P", raw_p)
    Q = build("Q", raw_q)
    try:
        assessment = make_assessment(P, Q)
    except AssessmentError as exc:
        raise InputFormatError(str(exc)) from exc
    from dataclasses import replace

    return assessment, replace(cfg, mode=RATIONAL if exact else FLOAT)


def witness_to_dict(w) -> dict[str, Any]:
    if isinstance(w, CycleWitness):
        return {
            "type": "cycle",
            "i_seq": list(w.cycle.i_seq),
            "j_seq": list(w.cycle.j_seq),
            "lhs": format_number(w.lhs),
            "rhs": format_number(w.rhs),
        }
    if isinstance(w, PairWitness):
        return {
            "type": "pair",
            "i": w.i,
            "j": w.j,
            "lhs": format_number(w.lhs),
            "rhs": format_number(w.rhs),
            "check": w.check,
        }
    raise TypeError(f"unknown witness {w!r}")


def report_to_dict(report: CoherenceReport) -> dict[str, Any]:
    return {
        "verdict": report.verdict,
        "method": report.method,
        "witness": witness_to_dict(report.witness) if report.witness else None,
        "blocks": [block_report_to_dict(b) for b in report.blocks],
        "note": report.note,
    }


def block_report_to_dict(b: BlockReport) -> dict[str, Any]:
    return {
        "rows": list(b.rows),
        "cols": list(b.cols),
        "verdict": b.report.verdict,
        "method": b.report.method,
        "witness": witness_to_dict(b.report.witness) if b.report.witness else None,
        "note": b.report.note,
    }


def solution_to_dict(solution: MarginalSolution, cfg: RunConfig) -> dict[str, Any]:
    f, g = solution.materialize(cfg=cfg)
    weights = list(solution.chosen_weights or ())
    blocks = []
    pos_idx = 0
    for block in solution.blocks:
        if block.positive:
            weight = weights[pos_idx]
            pos_idx += 1
        else:
            weight = 0
        blocks.append(
            {
                "rows": list(block.rows),
                "cols": list(block.cols),
                "f": [format_number(x) for x in block.f_part],
                "g": [format_number(x) for x in block.g_part],
                "positive": block.positive,
                "weight": format_number(weight),
            }
        )
    return {
        "kind": solution.kind,
        "f": [format_number(x) for x in f],
        "g": [format_number(x) for x in g],
        "blocks": blocks,
        "weight_freedom": solution.weight_freedom,
        "warnings": list(solution.warnings),
    }


def infeasible_to_dict(solution: MarginalSolution) -> dict[str, Any]:
    blocks = [
        {
            "rows": list(block.rows),
            "cols": list(block.cols),
            "f": [format_number(x) for x in block.f_part],
            "g": [format_number(x) for x in block.g_part],
            "positive": block.positive,
            "weight": 0,
        }
        for block in solution.blocks
    ]
    return {
        "kind": "infeasible",
        "f": None,
        "g": None,
        "blocks": blocks,
        "weight_freedom": 0,
        "warnings": list(solution.warnings),
    }


def render_json(payload: dict[str, Any]) -> str:
    return json.dumps(payload, indent=2) + "\n"


def render_text(payload: dict[str, Any], indent: str = "") -> str:
    """Human summary of the same payload: deterministic key: value lines."""
    lines: list[str] = []
    for key, value in payload.items():
        if isinstance(value, dict):
            lines.append(f"{indent}{key}:")
            lines.append(render_text(value, indent + "  ").rstrip("\n"))
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{indent}{key}:")
            for idx, item in enumerate(value, start=1):
                lines.append(f"{indent}  - #{idx}")
                lines.append(render_text(item, indent + "    ").rstrip("\n"))
        else:
            lines.append(f"{indent}{key}: {value}")
    return "\n".join(lines) + "\n"
