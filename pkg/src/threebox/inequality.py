"""Instrumental inequality checks on behavior tables.

Whenever the choice ``C`` influences the final outcome only through the
intermediate outcome (no parameter-dependence arrow), the observed behavior
must satisfy a family of inequalities with bound 1.  Two equivalent forms
are implemented *independently of each other*, so their agreement is a
genuine cross-check rather than a tautology:

* the compact form  ``max_i Σ_j [max_k P(M1=i, M2=j | C=k)] ≤ 1``;
* the unfolded pairwise family, four lines per choice pair (k, l), k < l::

      P(M1=0,M2=0|C=k) + P(M1=0,M2=1|C=l) ≤ 1     (line 1)
      P(M1=1,M2=0|C=k) + P(M1=1,M2=1|C=l) ≤ 1     (line 2)
      P(M1=0,M2=1|C=k) + P(M1=0,M2=0|C=l) ≤ 1     (line 3)
      P(M1=1,M2=1|C=k) + P(M1=1,M2=0|C=l) ≤ 1     (line 4)

Lines 3 and 4 are lines 1 and 2 with the pair swapped, so enumerating
unordered pairs with all four lines covers both orientations.  A violation
certifies that some extra arrow out of ``C`` is required; equality with the
bound is never a violation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .behavior import Behavior, format_fraction

COMPACT = "compact"
PAIRWISE = "pairwise"

# (line number, i, j of the k-term, j of the l-term)
_PAIRWISE_LINES = (
    (1, 0, 0, 1),
    (2, 1, 0, 1),
    (3, 0, 1, 0),
    (4, 1, 1, 0),
)


def _term(i: int, j: int, k: int) -> str:
    return f"P(M1={i},M2={j}|C={k})"


@dataclass(frozen=True)
class InequalityEntry:
    """One evaluated inequality: its indices, terms, value, and bound."""

    label: str
    indices: tuple[int, ...]
    terms: tuple[str, ...]
    lhs: Fraction
    bound: Fraction = Fraction(1)

    @property
    def violated(self) -> bool:
        return self.lhs > self.bound


@dataclass(frozen=True)
class InequalityReport:
    form: str
    entries: tuple[InequalityEntry, ...]

    @property
    def violated(self) -> bool:
        return any(e.violated for e in self.entries)

    def violations(self) -> tuple[InequalityEntry, ...]:
        return tuple(e for e in self.entries if e.violated)

    def worst(self) -> InequalityEntry:
        """Entry with the largest left-hand side (first among ties)."""
        return max(self.entries, key=lambda e: e.lhs)


def _require_multiple_choices(b: Behavior) -> None:
    if len(b.choices) < 2:
        raise ValueError("instrumental inequalities need at least two choices")


def compact_check(b: Behavior) -> InequalityReport:
    """Evaluate the compact form, one entry per intermediate outcome i."""
    _require_multiple_choices(b)
    entries = []
    for i in (0, 1):
        lhs = Fraction(0)
        terms = []
        for j in (0, 1):
            best_k = max(b.choices, key=lambda k: (b.prob(i, j, k), -k))
            lhs += b.prob(i, j, best_k)
            terms.append(_term(i, j, best_k))
        entries.append(InequalityEntry(
            label=f"i={i}", indices=(i,), terms=tuple(terms), lhs=lhs))
    return InequalityReport(form=COMPACT, entries=tuple(entries))


def pairwise_check(b: Behavior) -> InequalityReport:
    """Evaluate the unfolded family, four lines per choice pair."""
    _require_multiple_choices(b)
    entries = []
    for k, l in combinations(b.choices, 2):
        for line, i, j_first, j_second in _PAIRWISE_LINES:
            lhs = b.prob(i, j_first, k) + b.prob(i, j_second, l)
            entries.append(InequalityEntry(
                label=f"line {line}, kl={k}{l}",
                indices=(line, k, l),
                terms=(_term(i, j_first, k), _term(i, j_second, l)),
                lhs=lhs,
            ))
    return InequalityReport(form=PAIRWISE, entries=tuple(entries))


def report_to_json(report: InequalityReport) -> str:
    payload = {
        "form": report.form,
        "violated": report.violated,
        "entries": [
            {
                "label": e.label,
                "indices": list(e.indices),
                "terms": list(e.terms),
                "lhs": format_fraction(e.lhs),
                "bound": format_fraction(e.bound),
                "violated": e.violated,
            }
            for e in report.entries
        ],
    }
    return json.dumps(payload, indent=2)


def report_to_markdown(report: InequalityReport) -> str:
    lines = [
        f"# Instrumental inequality check ({report.form} form)",
        "",
        "| inequality | lhs | bound | violated |",
        "|---|---|---|---|",
    ]
    for e in report.entries:
        expr = " + ".join(e.terms)
        row = f"| {e.label}: {expr} | {e.lhs} | {e.bound} | {'**VIOLATED**' if e.violated else 'no'} |"
        lines.append(row)
    lines.append("")
    verdict = "violated" if report.violated else "satisfied"
    lines.append(f"Overall: **{verdict}**")
    return "\n".join(lines)
