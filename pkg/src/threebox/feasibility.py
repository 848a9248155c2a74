"""Exact feasibility of a behavior under a causal DAG variant.

Whether a DAG variant can generate a behavior is decided by reduction to a
finite linear program over *canonical deterministic strategies*.  For finite
observed cardinalities, an arbitrary latent common cause is equivalent to a
probability distribution over deterministic response functions: each latent
value λ induces one concrete response pair (an intermediate response and a
final response over the variant's allowed inputs), so pushing the latent
distribution forward along λ ↦ (responses of λ) turns any structural model
into a mixture of the finitely many deterministic strategies; conversely any
such mixture is realised by a latent variable ranging over the strategies
themselves.  A behavior is therefore compatible with the variant iff some
convex combination of strategy columns reproduces every table entry.

Strategies per variant:

* pure setting — any response ``f: choices → {0,1}`` for the intermediate
  outcome, crossed with a final response ``g`` over the inputs enabled by
  the red arrows (none, M1, C, or C and M1);
* realist setting — a definite particle position ``v ∈ {1,2,3}`` with the
  intermediate outcome forced to ``M1 = 1 iff C = v``, crossed with the
  same final responses.

The linear program is solved in exact rational arithmetic (phase-1 simplex,
Bland's rule), so feasible verdicts come with a certificate mixture that
reconstructs the behavior bit-exactly and infeasible verdicts are proofs,
not numerical judgements.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

from .behavior import Behavior, CELLS, format_fraction, restrict
from .dag import ALL_VARIANTS, DagVariant
from .inequality import InequalityEntry, pairwise_check

REALIST_POSITIONS = (1, 2, 3)


@dataclass(frozen=True)
class Strategy:
    """One deterministic response assignment.

    ``m1`` maps each choice to the intermediate outcome (for realist
    strategies it is the indicator of ``v``); ``m2`` maps tuples over
    ``m2_inputs`` (a subset of ("C", "M1")) to the final outcome.
    """

    choices: tuple[int, ...]
    v: int | None
    m1: tuple[tuple[int, int], ...]
    m2_inputs: tuple[str, ...]
    m2: tuple[tuple[tuple[int, ...], int], ...]

    def respond(self, k: int) -> tuple[int, int]:
        """Outcome pair (M1, M2) produced under choice ``k``."""
        m1_map = dict(self.m1)
        i = m1_map[k]
        args = []
        for name in self.m2_inputs:
            args.append(k if name == "C" else i)
        j = dict(self.m2)[tuple(args)]
        return i, j

    def response_vector(self) -> tuple[tuple[int, int], ...]:
        return tuple(self.respond(k) for k in self.choices)

    def describe(self) -> str:
        m1_part = (f"V={self.v}" if self.v is not None
                   else "M1: " + ", ".join(f"{k}↦{i}" for k, i in self.m1))
        if self.m2_inputs:
            sig = ",".join(self.m2_inputs)
            body = ", ".join(
                f"({','.join(str(a) for a in args)})↦{j}" for args, j in self.m2)
            m2_part = f"M2({sig}): {body}"
        else:
            m2_part = f"M2=const {self.m2[0][1]}"
        return f"{m1_part}; {m2_part}"


@dataclass(frozen=True)
class StrategySpace:
    """Complete, duplicate-free strategy enumeration for a variant."""

    variant: DagVariant
    choices: tuple[int, ...]
    strategies: tuple[Strategy, ...]


def m2_signature(variant: DagVariant) -> tuple[str, ...]:
    """Inputs available to the final response under the variant's arrows."""
    inputs = []
    if variant.parameter_arrow:
        inputs.append("C")
    if variant.outcome_arrow:
        inputs.append("M1")
    return tuple(inputs)


def enumerate_strategies(variant: DagVariant, choices: Iterable[int]) -> StrategySpace:
    """All deterministic strategies, in a fixed documented order.

    The intermediate responses vary fastest in the outer loop (pure: all
    maps choices→{0,1} in lexicographic order; realist: positions 1, 2, 3)
    and final responses in lexicographic order within each.
    """
    kept = tuple(sorted(set(choices)))
    if not kept:
        raise ValueError("need at least one choice")

    sig = m2_signature(variant)
    domains = {"C": kept, "M1": (0, 1)}
    g_domain = tuple(product(*(domains[name] for name in sig)))

    if variant.setting == "pure":
        m1_maps = [
            tuple(zip(kept, values))
            for values in product((0, 1), repeat=len(kept))
        ]
        v_values: list[int | None] = [None] * len(m1_maps)
    else:
        m1_maps = [
            tuple((k, 1 if k == v else 0) for k in kept)
            for v in REALIST_POSITIONS
        ]
        v_values = list(REALIST_POSITIONS)

    strategies = []
    for m1_map, v in zip(m1_maps, v_values):
        for g_values in product((0, 1), repeat=len(g_domain)):
            strategies.append(Strategy(
                choices=kept,
                v=v,
                m1=m1_map,
                m2_inputs=sig,
                m2=tuple(zip(g_domain, g_values)),
            ))
    return StrategySpace(variant=variant, choices=kept, strategies=tuple(strategies))


@dataclass(frozen=True)
class FeasibilityResult:
    """Verdict plus either a certificate mixture or an inequality witness."""

    feasible: bool
    variant: DagVariant
    choices: tuple[int, ...]
    certificate: tuple[tuple[Strategy, Fraction], ...] | None = None
    witness: InequalityEntry | None = None

    def witness_summary(self) -> str:
        if self.feasible:
            size = len(self.certificate or ())
            return f"certificate with {size} strategies"
        if self.witness is not None:
            return (f"instrumental inequality {self.witness.label}: "
                    f"{' + '.join(self.witness.terms)} = {self.witness.lhs} > 1")
        return "no convex strategy mixture matches (exact LP)"


def solve_equality_feasibility(rows: Sequence[Sequence[Fraction]],
                               rhs: Sequence[Fraction]) -> list[Fraction] | None:
    """Find x ≥ 0 with ``rows · x = rhs`` exactly, or None if infeasible.

    Phase-1 simplex over rationals: minimise the sum of one artificial
    variable per row.  Bland's rule (lowest eligible index enters, lowest
    basic index leaves among minimum ratios) prevents cycling and makes the
    returned vertex deterministic for a fixed column order.
    """
    m = len(rows)
    if m == 0:
        return []
    n = len(rows[0])
    zero, one = Fraction(0), Fraction(1)

    tableau: list[list[Fraction]] = []
    for r in range(m):
        if len(rows[r]) != n:
            raise ValueError("ragged constraint matrix")
        sign = -1 if rhs[r] < 0 else 1
        row = [sign * c for c in rows[r]]
        row.extend(one if a == r else zero for a in range(m))
        row.append(sign * rhs[r])
        tableau.append(row)

    total = n + m
    basis = [n + r for r in range(m)]
    # Reduced costs for minimising the artificial sum: structural columns
    # start at minus their column sums, artificial columns at zero.
    reduced = [zero] * (total + 1)
    for j in range(n):
        reduced[j] = -sum((tableau[r][j] for r in range(m)), zero)
    reduced[total] = -sum((tableau[r][total] for r in range(m)), zero)

    while True:
        entering = next((j for j in range(total) if reduced[j] < 0), None)
        if entering is None:
            break
        leaving = None
        best_ratio: Fraction | None = None
        for r in range(m):
            coeff = tableau[r][entering]
            if coeff > 0:
                ratio = tableau[r][total] / coeff
                if (best_ratio is None or ratio < best_ratio
                        or (ratio == best_ratio and basis[r] < basis[leaving])):
                    best_ratio = ratio
                    leaving = r
        if leaving is None:
            raise RuntimeError("phase-1 objective unbounded; constraints are malformed")
        pivot_row = tableau[leaving]
        pivot = pivot_row[entering]
        for j in range(total + 1):
            if pivot_row[j]:
                pivot_row[j] /= pivot
        # the tableau stays sparse; eliminating only over the pivot row's
        # support is markedly faster than sweeping every column
        nonzero = [j for j in range(total + 1) if pivot_row[j]]
        for r in range(m):
            if r == leaving:
                continue
            factor = tableau[r][entering]
            if factor:
                row = tableau[r]
                for j in nonzero:
                    row[j] -= factor * pivot_row[j]
        factor = reduced[entering]
        if factor:
            for j in nonzero:
                reduced[j] -= factor * pivot_row[j]
        basis[leaving] = entering

    residual = sum((tableau[r][total] for r in range(m) if basis[r] >= n), zero)
    if residual != 0:
        return None
    solution = [zero] * n
    for r in range(m):
        if basis[r] < n:
            solution[basis[r]] = tableau[r][total]
    return solution


def mixture_behavior(strategies: Sequence[Strategy],
                     weights: Sequence[Fraction],
                     choices: Iterable[int]) -> Behavior:
    """Behavior produced by a convex mixture of strategies."""
    kept = tuple(sorted(set(choices)))
    if len(strategies) != len(weights):
        raise ValueError("strategies and weights differ in length")
    if sum(weights, Fraction(0)) != 1 or any(w < 0 for w in weights):
        raise ValueError("weights must be nonnegative and sum to 1")
    table = {(i, j, k): Fraction(0) for k in kept for i, j in CELLS}
    for strategy, weight in zip(strategies, weights):
        for k in kept:
            i, j = strategy.respond(k)
            table[i, j, k] += weight
    return Behavior(choices=kept, table=table)


def decide(b: Behavior, variant: DagVariant) -> FeasibilityResult:
    """Exact feasibility of ``b`` under ``variant``.

    Distinct strategies sharing one response vector contribute identical LP
    columns, so the program is solved over deduplicated columns (the first
    strategy in enumeration order represents its class); the certificate is
    expressed on those representatives.  Feasible certificates are verified
    to reconstruct the behavior exactly before being returned.
    """
    space = enumerate_strategies(variant, b.choices)

    representatives: list[Strategy] = []
    vectors: list[tuple[tuple[int, int], ...]] = []
    seen: set[tuple[tuple[int, int], ...]] = set()
    for strategy in space.strategies:
        vec = strategy.response_vector()
        if vec not in seen:
            seen.add(vec)
            representatives.append(strategy)
            vectors.append(vec)

    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for pos, k in enumerate(b.choices):
        for i, j in CELLS:
            rows.append([
                Fraction(1) if vec[pos] == (i, j) else Fraction(0)
                for vec in vectors
            ])
            rhs.append(b.prob(i, j, k))
    rows.append([Fraction(1)] * len(representatives))
    rhs.append(Fraction(1))

    solution = solve_equality_feasibility(rows, rhs)
    if solution is None:
        witness = None
        if not variant.parameter_arrow and len(b.choices) >= 2:
            report = pairwise_check(b)
            violations = report.violations()
            if violations:
                witness = violations[0]
        return FeasibilityResult(False, variant, b.choices, witness=witness)

    certificate = tuple(
        (representatives[idx], weight)
        for idx, weight in enumerate(solution)
        if weight != 0
    )
    reconstructed = mixture_behavior(
        [s for s, _ in certificate], [w for _, w in certificate], b.choices)
    if reconstructed != b:
        raise RuntimeError("feasible certificate failed exact reconstruction")
    return FeasibilityResult(True, variant, b.choices, certificate=certificate)


SCOPES = ((1, 2), (1, 2, 3))


@dataclass(frozen=True)
class Figure4Cell:
    variant: DagVariant
    scope: tuple[int, ...]
    result: FeasibilityResult
    minimal: bool


@dataclass(frozen=True)
class Figure4Report:
    """Feasibility of all eight DAG variants across both choice scopes."""

    cells: tuple[Figure4Cell, ...]

    def cell(self, variant: DagVariant, scope: tuple[int, ...]) -> Figure4Cell:
        for cell in self.cells:
            if cell.variant == variant and cell.scope == scope:
                return cell
        raise ValueError(f"no cell for {variant.shorthand} at scope {scope}")


def figure4_report(b: Behavior) -> Figure4Report:
    """Decide every variant at scopes {1,2} and {1,2,3} and flag minimal cells.

    A feasible cell is minimal when no variant of the same setting with a
    strict subset of its red arrows is feasible at the same scope.
    """
    if b.choices != (1, 2, 3):
        raise ValueError("the summary matrix needs the full behavior over choices 1, 2, 3")

    results: dict[tuple[str, tuple[int, ...]], FeasibilityResult] = {}
    for scope in SCOPES:
        scoped = restrict(b, scope)
        for variant in ALL_VARIANTS:
            results[variant.shorthand, scope] = decide(scoped, variant)

    cells = []
    for variant in ALL_VARIANTS:
        for scope in SCOPES:
            result = results[variant.shorthand, scope]
            minimal = False
            if result.feasible:
                minimal = not any(
                    results[other.shorthand, scope].feasible
                    for other in ALL_VARIANTS
                    if other.setting == variant.setting
                    and other.red_arrows() < variant.red_arrows()
                )
            cells.append(Figure4Cell(variant=variant, scope=scope,
                                     result=result, minimal=minimal))
    return Figure4Report(cells=tuple(cells))


def _scope_label(scope: tuple[int, ...]) -> str:
    return "C=" + ",".join(str(k) for k in scope)


def figure4_to_markdown(report: Figure4Report) -> str:
    lines = [
        "# Which causal structures can generate the three-box statistics?",
        "",
        "| variant | " + " | ".join(_scope_label(s) for s in SCOPES) + " |",
        "|---|" + "---|" * len(SCOPES),
    ]
    for variant in ALL_VARIANTS:
        row = [variant.shorthand]
        for scope in SCOPES:
            cell = report.cell(variant, scope)
            if cell.result.feasible:
                text = "feasible" + (" (minimal)" if cell.minimal else "")
            else:
                text = f"infeasible — {cell.result.witness_summary()}"
            row.append(text)
        lines.append("| " + " | ".join(row) + " |")
    return "\n".join(lines)


def figure4_to_json(report: Figure4Report) -> str:
    payload = {
        "scopes": [_scope_label(s) for s in SCOPES],
        "rows": [
            {
                "variant": variant.shorthand,
                "cells": {
                    _scope_label(scope): _cell_payload(report.cell(variant, scope))
                    for scope in SCOPES
                },
            }
            for variant in ALL_VARIANTS
        ],
    }
    return json.dumps(payload, indent=2, ensure_ascii=False)


def _cell_payload(cell: Figure4Cell) -> dict:
    out: dict = {"feasible": cell.result.feasible, "minimal": cell.minimal}
    if cell.result.feasible:
        out["certificate"] = [
            {"strategy": s.describe(), "weight": format_fraction(w)}
            for s, w in (cell.result.certificate or ())
        ]
    else:
        out["witness"] = cell.result.witness_summary()
    return out


def result_to_json(result: FeasibilityResult) -> str:
    payload: dict = {
        "variant": result.variant.shorthand,
        "choices": list(result.choices),
        "feasible": result.feasible,
    }
    if result.feasible:
        payload["certificate"] = [
            {"strategy": s.describe(), "weight": format_fraction(w)}
            for s, w in (result.certificate or ())
        ]
    else:
        payload["witness"] = result.witness_summary()
    return json.dumps(payload, indent=2, ensure_ascii=False)


def result_to_markdown(result: FeasibilityResult) -> str:
    verdict = "feasible" if result.feasible else "infeasible"
    lines = [
        f"# Feasibility of {result.variant.shorthand} for choices {list(result.choices)}",
        "",
        f"Verdict: **{verdict}**",
    ]
    if result.feasible and result.certificate:
        lines.extend(["", "| strategy | weight |", "|---|---|"])
        for strategy, weight in result.certificate:
            lines.append(f"| {strategy.describe()} | {weight} |")
    elif not result.feasible:
        lines.extend(["", result.witness_summary()])
    return "\n".join(lines)
