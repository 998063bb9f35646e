"""Command line interface.

Subcommands: validate, check, marginals, oracle.  Reports are JSON by
default (the stable contract) with a text rendering available.  Exit codes:
0 coherent/success, 1 incoherent, 2 input error, 3 undecided, 4 infeasible.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from typing import Optional

from .coherence import check_coherence
from .errors import (
    AssessmentError,
    IncoherentAssessmentError,
    InfeasibleSystemError,
    InputFormatError,
    MaskError,
    UndecidedCoherenceError,
)
from .graph import connected_components, support_graph
from .io import (
    infeasible_to_dict,
    load_assessment,
    render_json,
    render_text,
    report_to_dict,
    solution_to_dict,
)
from .marginals import solve_marginals
from .matrix import anchor_columns, has_symmetric_support
from .numeric import RunConfig, format_number
from .oracle import derive_assessment, random_joint

EXIT_OK = 0
EXIT_INCOHERENT = 1
EXIT_INPUT = 2
EXIT_UNDECIDED = 3
EXIT_INFEASIBLE = 4


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise InputFormatError(f"cannot read {path}: {exc}") from exc


def _config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        eps=args.tolerance,
        tau_zero=args.zero_threshold,
        max_bruteforce_cells=args.max_bruteforce_cells,
        allow_incoherent=getattr(args, "allow_incoherent", False),
        output_format=args.format,
    )


def _emit(payload: dict, fmt: str) -> None:
    if fmt == "json":
        sys.stdout.write(render_json(payload))
    else:
        sys.stdout.write(render_text(payload))


def cmd_validate(args: argparse.Namespace) -> int:
    cfg = _config(args)
    assessment, cfg = load_assessment(_read_input(args.input), cfg, args.exact)
    anchors = anchor_columns(assessment, cfg)
    blocks = connected_components(support_graph(assessment, cfg))
    payload = {
        "valid": True,
        "rows": assessment.l,
        "cols": assessment.m,
        "mode": cfg.mode,
        "positive_columns": list(anchors) if anchors else None,
        "symmetric_support": has_symmetric_support(assessment, cfg),
        "connected": len(blocks) == 1,
        "blocks": [{"rows": list(b.rows), "cols": list(b.cols)} for b in blocks],
    }
    _emit(payload, cfg.output_format)
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    cfg = _config(args)
    assessment, cfg = load_assessment(_read_input(args.input), cfg, args.exact)
    report = check_coherence(assessment, cfg)
    _emit(report_to_dict(report), cfg.output_format)
    return {
        "coherent": EXIT_OK,
        "incoherent": EXIT_INCOHERENT,
        "undecided": EXIT_UNDECIDED,
    }[report.verdict]


def cmd_marginals(args: argparse.Namespace) -> int:
    cfg = _config(args)
    assessment, cfg = load_assessment(_read_input(args.input), cfg, args.exact)
    try:
        solution = solve_marginals(assessment, cfg)
    except IncoherentAssessmentError as exc:
        _emit(
            {"error": "incoherent", "message": str(exc), "report": report_to_dict(exc.report)},
            cfg.output_format,
        )
        return EXIT_INCOHERENT
    except UndecidedCoherenceError as exc:
        _emit(
            {"error": "undecided", "message": str(exc), "report": report_to_dict(exc.report)},
            cfg.output_format,
        )
        return EXIT_UNDECIDED
    except InfeasibleSystemError as exc:
        payload = (
            infeasible_to_dict(exc.solution)
            if exc.solution is not None
            else {"error": "infeasible", "message": str(exc)}
        )
        _emit(payload, cfg.output_format)
        return EXIT_INFEASIBLE
    _emit(solution_to_dict(solution, cfg), cfg.output_format)
    return EXIT_OK


def _parse_mask(raw: Optional[str]) -> Optional[frozenset[tuple[int, int]]]:
    if raw is None:
        return None
    cells = set()
    for chunk in raw.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(",")
        if len(parts) != 2:
            raise InputFormatError(f"mask cell {chunk!r} is not of the form i,j")
        try:
            cells.add((int(parts[0]), int(parts[1])))
        except ValueError as exc:
            raise InputFormatError(f"mask cell {chunk!r} is not of the form i,j") from exc
    if not cells:
        raise InputFormatError("mask is empty")
    return frozenset(cells)


def cmd_oracle(args: argparse.Namespace) -> int:
    mask = _parse_mask(args.mask)
    joint = random_joint(args.rows, args.cols, args.seed, mask, exact=True)
    assessment = derive_assessment(joint)
    prefix = args.output_prefix or f"oracle_{args.rows}x{args.cols}_s{args.seed}"
    joint_path = f"{prefix}.joint.json"
    assessment_path = f"{prefix}.assessment.json"
    joint_doc = {"joint": [[format_number(x) for x in row] for row in joint.entries]}
    pair_doc = {
        "P": [[format_number(x) for x in row] for row in assessment.P.entries],
        "Q": [[format_number(x) for x in row] for row in assessment.Q.entries],
    }
    with open(joint_path, "w", encoding="utf-8") as handle:
        handle.write(json.dumps(joint_doc, indent=2) + "\n")
    with open(assessment_path, "w", encoding="utf-8") as handle:
        handle.write(json.dumps(pair_doc, indent=2) + "\n")
    _emit({"joint_file": joint_path, "assessment_file": assessment_path}, args.format)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pqcheck",
        description=(
            "Check the coherence of a pair of conditional probability tables "
            "and reconstruct the marginal distributions."
        ),
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--tolerance", type=float, default=1e-9, help="relative tolerance in float mode"
    )
    common.add_argument(
        "--zero-threshold",
        type=float,
        default=0.0,
        help="entries at or below this count as zero in float mode",
    )
    common.add_argument(
        "--exact",
        action="store_true",
        help="force exact rational arithmetic (entries must be ints or 'a/b' strings)",
    )
    common.add_argument(
        "--max-bruteforce-cells",
        type=int,
        default=36,
        help="refuse cycle enumeration beyond this many matrix cells",
    )
    common.add_argument(
        "--format", choices=("json", "text"), default="json", help="report format"
    )

    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser(
        "validate", parents=[common], help="validate the input and report its structure"
    )
    p_validate.add_argument("input", nargs="?", default="-", help="input file or - for stdin")
    p_validate.set_defaults(func=cmd_validate)

    p_check = sub.add_parser("check", parents=[common], help="decide coherence")
    p_check.add_argument("input", nargs="?", default="-", help="input file or - for stdin")
    p_check.set_defaults(func=cmd_check)

    p_marg = sub.add_parser(
        "marginals", parents=[common], help="reconstruct the marginal distributions"
    )
    p_marg.add_argument("input", nargs="?", default="-", help="input file or - for stdin")
    p_marg.add_argument(
        "--allow-incoherent",
        action="store_true",
        help="solve the balance system even when the assessment is not coherent",
    )
    p_marg.set_defaults(func=cmd_marginals)

    p_oracle = sub.add_parser(
        "oracle", parents=[common], help="emit a seeded joint and its derived pair"
    )
    p_oracle.add_argument("rows", type=int)
    p_oracle.add_argument("cols", type=int)
    p_oracle.add_argument("--seed", type=int, default=0)
    p_oracle.add_argument(
        "--mask", help="support cells as 'i,j;i,j;...' (1-based); default full support"
    )
    p_oracle.add_argument(
        "-o", "--output-prefix", help="prefix for the two emitted files"
    )
    p_oracle.set_defaults(func=cmd_oracle)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputFormatError, MaskError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except AssessmentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
