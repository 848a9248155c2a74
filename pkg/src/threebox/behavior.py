"""Exact-rational behavior tables P(M1, M2 | C).

A :class:`Behavior` is the package's lingua franca: the quantum engine, the
structural-model enumerator, the inequality checks, and the feasibility
solver all produce or consume one.  Entries are ``fractions.Fraction``
values, columns are normalised exactly, and the JSON serialisation writes
every probability as a ``"num/den"`` string so that no float ever appears.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

CELLS = ((0, 0), (0, 1), (1, 0), (1, 1))
VALID_CHOICES = (1, 2, 3)

_FRACTION_RE = re.compile(r"^(-?\d+)/(\d+)$")


def format_fraction(q: Fraction) -> str:
    """Canonical ``num/den`` rendering, denominator always explicit."""
    return f"{q.numerator}/{q.denominator}"


def parse_fraction(text: str) -> Fraction:
    m = _FRACTION_RE.match(text)
    if not m:
        raise ValueError(f"malformed rational {text!r}; expected 'num/den'")
    num, den = int(m.group(1)), int(m.group(2))
    if den == 0:
        raise ValueError(f"zero denominator in rational {text!r}")
    return Fraction(num, den)


@dataclass(frozen=True)
class Behavior:
    """Table P(M1=i, M2=j | C=k) over binary outcomes and labelled choices."""

    choices: tuple[int, ...]
    table: Mapping[tuple[int, int, int], Fraction]

    def __post_init__(self) -> None:
        if not self.choices:
            raise ValueError("behavior needs at least one choice")
        if len(set(self.choices)) != len(self.choices):
            raise ValueError("behavior choices must be distinct")
        if any(k not in VALID_CHOICES for k in self.choices):
            raise ValueError(f"choices must be drawn from {VALID_CHOICES}, got {self.choices}")
        object.__setattr__(self, "choices", tuple(sorted(self.choices)))
        normalized: dict[tuple[int, int, int], Fraction] = {}
        for k in self.choices:
            total = Fraction(0)
            for i, j in CELLS:
                try:
                    value = Fraction(self.table[i, j, k])
                except KeyError:
                    raise ValueError(f"behavior column C={k} is missing entry (M1={i}, M2={j})") from None
                if value < 0:
                    raise ValueError(f"behavior column C={k} entry (M1={i}, M2={j}) is negative: {value}")
                normalized[i, j, k] = value
                total += value
            if total != 1:
                raise ValueError(f"behavior column C={k} sums to {total}, expected 1")
        if len(self.table) != 4 * len(self.choices):
            extra = set(self.table) - set(normalized)
            raise ValueError(f"behavior table has entries outside its choice set: {sorted(extra)}")
        object.__setattr__(self, "table", normalized)

    def prob(self, i: int, j: int, k: int) -> Fraction:
        if k not in self.choices:
            raise ValueError(f"choice {k} not in behavior (choices: {self.choices})")
        return self.table[i, j, k]

    def column(self, k: int) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        """Entries for choice ``k`` in (00, 01, 10, 11) order."""
        return tuple(self.prob(i, j, k) for i, j in CELLS)  # type: ignore[return-value]


def three_box_behavior() -> Behavior:
    """The canonical three-box table.

    Hard-coded constants, independent of the quantum engine in
    :mod:`threebox.pps`; the test suite cross-checks the two code paths
    entry by entry.
    """
    columns = {
        1: (Fraction(2, 3), Fraction(0), Fraction(2, 9), Fraction(1, 9)),
        2: (Fraction(2, 3), Fraction(0), Fraction(2, 9), Fraction(1, 9)),
        3: (Fraction(2, 9), Fraction(4, 9), Fraction(2, 9), Fraction(1, 9)),
    }
    table = {
        (i, j, k): columns[k][n]
        for k in (1, 2, 3)
        for n, (i, j) in enumerate(CELLS)
    }
    return Behavior(choices=(1, 2, 3), table=table)


def from_joint_tables(tables: Mapping[int, Mapping[tuple[int, int], Fraction]]) -> Behavior:
    """Assemble a behavior from per-choice joint tables (e.g. pps output)."""
    table = {
        (i, j, k): Fraction(tables[k][i, j])
        for k in tables
        for i, j in CELLS
    }
    return Behavior(choices=tuple(tables), table=table)


def restrict(b: Behavior, keep: Iterable[int]) -> Behavior:
    """Behavior restricted to a nonempty subset of its choices."""
    kept = tuple(sorted(set(keep)))
    if not kept:
        raise ValueError("cannot restrict a behavior to an empty choice set")
    foreign = [k for k in kept if k not in b.choices]
    if foreign:
        raise ValueError(f"cannot restrict to choices {foreign} absent from behavior {b.choices}")
    return Behavior(
        choices=kept,
        table={(i, j, k): b.table[i, j, k] for k in kept for i, j in CELLS},
    )


def m2_marginal(b: Behavior, k: int) -> Fraction:
    """P(M2=1 | C=k)."""
    return b.prob(0, 1, k) + b.prob(1, 1, k)


def is_signalling(b: Behavior) -> tuple[bool, tuple[int, int] | None]:
    """Whether the M2 marginal depends on the choice.

    Returns ``(True, (k, l))`` with the first witnessing pair in
    lexicographic order, or ``(False, None)``.
    """
    if len(b.choices) < 2:
        raise ValueError("signalling needs at least two choices to compare")
    for a in range(len(b.choices)):
        for c in range(a + 1, len(b.choices)):
            k, l = b.choices[a], b.choices[c]
            if m2_marginal(b, k) != m2_marginal(b, l):
                return True, (k, l)
    return False, None


def to_json(b: Behavior) -> str:
    """Canonical JSON; round-trips byte-identically through :func:`from_json`."""
    payload = {
        "choices": list(b.choices),
        "table": {
            f"C={k}": {f"{i}{j}": format_fraction(b.table[i, j, k]) for i, j in CELLS}
            for k in b.choices
        },
    }
    return json.dumps(payload, indent=2)


def from_json(text: str) -> Behavior:
    """Parse the canonical JSON form, rejecting malformed tables loudly."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"behavior is not valid JSON: {exc}") from None
    if not isinstance(payload, dict) or set(payload) != {"choices", "table"}:
        raise ValueError("behavior JSON must have exactly the keys 'choices' and 'table'")
    choices = payload["choices"]
    if (not isinstance(choices, list) or not choices
            or any(not isinstance(k, int) or isinstance(k, bool) for k in choices)):
        raise ValueError("behavior 'choices' must be a nonempty list of integers")
    columns = payload["table"]
    if not isinstance(columns, dict):
        raise ValueError("behavior 'table' must be an object keyed by column")
    expected_keys = {f"C={k}" for k in choices}
    if set(columns) != expected_keys:
        raise ValueError(
            f"behavior table columns {sorted(columns)} do not match choices {sorted(expected_keys)}"
        )
    table: dict[tuple[int, int, int], Fraction] = {}
    for k in choices:
        column = columns[f"C={k}"]
        if not isinstance(column, dict) or set(column) != {"00", "01", "10", "11"}:
            raise ValueError(f"column C={k} must have exactly the cells 00, 01, 10, 11")
        for i, j in CELLS:
            cell = column[f"{i}{j}"]
            if not isinstance(cell, str):
                raise ValueError(f"column C={k} cell {i}{j} must be a 'num/den' string, got {cell!r}")
            try:
                table[i, j, k] = parse_fraction(cell)
            except ValueError as exc:
                raise ValueError(f"column C={k} cell {i}{j}: {exc}") from None
    return Behavior(choices=tuple(choices), table=table)
