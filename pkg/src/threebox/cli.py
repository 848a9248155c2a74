"""Command-line entry point.

Subcommands map one-to-one onto the library's claim clusters: exact
three-box statistics, post-selected conditionals, structural-model runs,
d-separation queries, instrumental-inequality checks, single feasibility
decisions, and the full summary matrix.  Output is deterministic, goes to
stdout, and never contains a float: probabilities are printed as exact
rationals in both the markdown and JSON formats.

Exit codes: 0 on success, 1 on domain errors (including a failed
``--expect`` assertion), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .behavior import (
    CELLS,
    Behavior,
    format_fraction,
    from_json,
    is_signalling,
    m2_marginal,
    restrict,
    three_box_behavior,
    to_json,
)
from .dag import DagVariant, build, canonical_node, d_separated, open_paths
from .feasibility import (
    decide,
    figure4_report,
    figure4_to_json,
    figure4_to_markdown,
    result_to_json,
    result_to_markdown,
)
from .inequality import compact_check, pairwise_check, report_to_json, report_to_markdown
from .pps import (
    abl_conditional,
    postselection_success,
    success_without_intermediate,
    three_box_scenario,
)
from .scm import CATALOG_CASES, catalog, induced_behavior

OUTCOME_OK = "ok"


def _parse_int_list(text: str, flag: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(",") if part.strip() != "")
    except ValueError:
        raise ValueError(f"{flag} expects a comma-separated integer list, got {text!r}") from None
    if not values:
        raise ValueError(f"{flag} expects a nonempty comma-separated integer list")
    return values


def _load_behavior(source: str) -> Behavior:
    if source == "builtin:three-box":
        return three_box_behavior()
    if source.startswith("builtin:"):
        raise ValueError(f"unknown builtin behavior {source!r}; available: builtin:three-box")
    path = Path(source)
    if not path.is_file():
        raise ValueError(f"behavior file not found: {source}")
    return from_json(path.read_text())


def _behavior_markdown(b: Behavior, title: str) -> str:
    lines = [
        f"# {title}",
        "",
        "| C | P(M1=0,M2=0) | P(M1=0,M2=1) | P(M1=1,M2=0) | P(M1=1,M2=1) |",
        "|---|---|---|---|---|",
    ]
    for k in b.choices:
        cells = " | ".join(str(b.prob(i, j, k)) for i, j in CELLS)
        lines.append(f"| {k} | {cells} |")
    return "\n".join(lines)


def _cmd_stats(args: argparse.Namespace) -> tuple[str, str]:
    b = three_box_behavior()
    if args.format == "json":
        return OUTCOME_OK, to_json(b)
    signalling, witness = is_signalling(b)
    text = _behavior_markdown(b, "Three-box statistics P(M1, M2 | C)")
    marginals = ", ".join(f"P(M2=1|C={k}) = {m2_marginal(b, k)}" for k in b.choices)
    text += f"\n\nM2 marginals: {marginals}"
    if signalling:
        text += f"\nSignalling: yes (choices {witness[0]} and {witness[1]} differ)"
    else:
        text += "\nSignalling: no"
    return OUTCOME_OK, text


def _cmd_abl(args: argparse.Namespace) -> tuple[str, str]:
    s = three_box_scenario()
    value = abl_conditional(s, args.choice, args.outcome)
    if args.format == "json":
        payload = {
            "choice": args.choice,
            "outcome": args.outcome,
            "conditional": format_fraction(value),
        }
        return OUTCOME_OK, json.dumps(payload, indent=2)
    return OUTCOME_OK, f"P(M1={args.outcome}|M2=1,C={args.choice}) = {value}"


def _cmd_success(args: argparse.Namespace) -> tuple[str, str]:
    s = three_box_scenario()
    choices = (args.choice,) if args.choice is not None else s.choices
    rows = [(k, postselection_success(s, k)) for k in choices]
    skipped = success_without_intermediate(s)
    if args.format == "json":
        payload = {
            "success": {f"C={k}": format_fraction(v) for k, v in rows},
            "without_intermediate": format_fraction(skipped),
        }
        return OUTCOME_OK, json.dumps(payload, indent=2)
    lines = [f"P(M2=1|C={k}) = {v}" for k, v in rows]
    lines.append(f"P(M2=1|no intermediate measurement) = {skipped}")
    return OUTCOME_OK, "\n".join(lines)


def _cmd_scm_run(args: argparse.Namespace) -> tuple[str, str]:
    m = catalog(args.case)
    choices = _parse_int_list(args.choices, "--choices")
    b = induced_behavior(m, choices)
    if args.format == "json":
        return OUTCOME_OK, to_json(b)
    title = f"Behavior induced by catalog SCM '{args.case}' ({m.variant.shorthand})"
    return OUTCOME_OK, _behavior_markdown(b, title)


def _cmd_dsep(args: argparse.Namespace) -> tuple[str, str]:
    variant = DagVariant.from_shorthand(args.variant)
    g = build(variant)
    given = tuple(canonical_node(n) for n in args.given.split(",")) if args.given else ()
    x, y = canonical_node(args.x), canonical_node(args.y)
    separated = d_separated(g, x, y, given)
    paths = open_paths(g, x, y, given)
    given_text = "{" + ",".join(given) + "}"
    if args.format == "json":
        payload = {
            "variant": variant.shorthand,
            "x": x,
            "y": y,
            "given": list(given),
            "separated": separated,
            "open_paths": [p.render() for p in paths],
        }
        return OUTCOME_OK, json.dumps(payload, indent=2, ensure_ascii=False)
    verdict = "d-separated" if separated else "d-connected"
    lines = [f"{x} and {y} are {verdict} given {given_text} in variant {variant.shorthand}"]
    if paths:
        lines.append("open paths:")
        lines.extend(f"- {p.render()}" for p in paths)
    return OUTCOME_OK, "\n".join(lines)


def _resolved_behavior(args: argparse.Namespace) -> Behavior:
    b = _load_behavior(args.behavior)
    if args.restrict is not None:
        b = restrict(b, _parse_int_list(args.restrict, "--restrict"))
    return b


def _cmd_iq_check(args: argparse.Namespace) -> tuple[str, str]:
    b = _resolved_behavior(args)
    report = compact_check(b) if args.form == "compact" else pairwise_check(b)
    outcome = "violated" if report.violated else OUTCOME_OK
    if args.format == "json":
        return outcome, report_to_json(report)
    return outcome, report_to_markdown(report)


def _cmd_feasibility_decide(args: argparse.Namespace) -> tuple[str, str]:
    variant = DagVariant.from_shorthand(args.variant)
    b = _resolved_behavior(args)
    result = decide(b, variant)
    outcome = "feasible" if result.feasible else "infeasible"
    if args.format == "json":
        return outcome, result_to_json(result)
    return outcome, result_to_markdown(result)


def _cmd_report_figure4(args: argparse.Namespace) -> tuple[str, str]:
    report = figure4_report(three_box_behavior())
    if args.format == "json":
        return OUTCOME_OK, figure4_to_json(report)
    return OUTCOME_OK, figure4_to_markdown(report)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="threebox",
        description="Exact statistics and causal-structure analysis of the three-box experiment.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("markdown", "json"), default="markdown",
                        help="output format (default: markdown)")
    common.add_argument("--expect", choices=("feasible", "infeasible", "violated", "ok"),
                        help="assert the command outcome; exit 1 on mismatch")

    three = sub.add_parser("three-box", help="quantum three-box statistics")
    three_sub = three.add_subparsers(dest="subcommand", required=True)
    p = three_sub.add_parser("stats", parents=[common], help="full joint table P(M1,M2|C)")
    p.set_defaults(handler=_cmd_stats)
    p = three_sub.add_parser("abl", parents=[common], help="post-selected conditional P(M1|M2=1,C)")
    p.add_argument("--choice", type=int, required=True, help="measurement choice C")
    p.add_argument("--outcome", type=int, choices=(0, 1), default=1,
                   help="intermediate outcome M1 (default: 1)")
    p.set_defaults(handler=_cmd_abl)
    p = three_sub.add_parser("success", parents=[common], help="post-selection success P(M2=1|C)")
    p.add_argument("--choice", type=int, help="single choice (default: all)")
    p.set_defaults(handler=_cmd_success)

    scm = sub.add_parser("scm", help="structural causal models")
    scm_sub = scm.add_subparsers(dest="subcommand", required=True)
    p = scm_sub.add_parser("run", parents=[common], help="enumerate a catalog SCM's behavior")
    p.add_argument("case", choices=CATALOG_CASES)
    p.add_argument("--choices", default="1,2,3", help="comma-separated choices (default: 1,2,3)")
    p.set_defaults(handler=_cmd_scm_run)

    dag = sub.add_parser("dag", help="causal DAG queries")
    dag_sub = dag.add_subparsers(dest="subcommand", required=True)
    p = dag_sub.add_parser("dsep", parents=[common], help="d-separation query with path witnesses")
    p.add_argument("--variant", required=True,
                   help="DAG variant shorthand, e.g. pure, realist+o, pure+op")
    p.add_argument("--x", required=True, help="first node")
    p.add_argument("--y", required=True, help="second node")
    p.add_argument("--given", default="", help="comma-separated conditioning set")
    p.set_defaults(handler=_cmd_dsep)

    iq = sub.add_parser("iq", help="instrumental inequalities")
    iq_sub = iq.add_subparsers(dest="subcommand", required=True)
    p = iq_sub.add_parser("check", parents=[common], help="evaluate an inequality family")
    p.add_argument("--behavior", required=True, help="behavior JSON file or builtin:three-box")
    p.add_argument("--restrict", help="comma-separated choices to keep")
    p.add_argument("--form", choices=("compact", "pairwise"), required=True)
    p.set_defaults(handler=_cmd_iq_check)

    feas = sub.add_parser("feasibility", help="strategy-polytope membership")
    feas_sub = feas.add_subparsers(dest="subcommand", required=True)
    p = feas_sub.add_parser("decide", parents=[common], help="exact LP feasibility for one variant")
    p.add_argument("--variant", required=True)
    p.add_argument("--behavior", required=True, help="behavior JSON file or builtin:three-box")
    p.add_argument("--restrict", help="comma-separated choices to keep")
    p.set_defaults(handler=_cmd_feasibility_decide)

    report = sub.add_parser("report", help="aggregate reports")
    report_sub = report.add_subparsers(dest="subcommand", required=True)
    p = report_sub.add_parser("figure4", parents=[common],
                              help="feasibility matrix: 8 variants x 2 choice scopes")
    p.set_defaults(handler=_cmd_report_figure4)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse prints usage errors itself (exit code 2)
        return int(exc.code or 0)
    try:
        outcome, text = args.handler(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(text)
    if args.expect is not None and args.expect != outcome:
        print(f"expectation failed: expected {args.expect}, observed {outcome}",
              file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
