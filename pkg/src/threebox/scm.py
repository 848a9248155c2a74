"""Structural causal models with finite exogenous variables.

An :class:`Scm` pairs a DAG variant with independent finite exogenous
distributions and one deterministic structural equation per endogenous
node.  The observed behavior is computed by *exhaustive enumeration* of the
exogenous product space for each fixed choice ``C=k`` — never by sampling —
so every induced probability is an exact rational and equality assertions
are meaningful.

Structural equations are written in a deliberately small expression
vocabulary (variables, constants, Kronecker delta, product, sum, ``1-x``,
and per-choice piecewise branches) and compiled to total lookup tables at
construction time.

The built-in catalog holds four models, one per DAG variant whose
sufficiency for the three-box statistics they establish:

* ``a``   — pure setting, no disturbance arrows: a biased binary common
  cause feeds both outcomes; matches the table restricted to choices 1, 2.
* ``b1``  — realist setting with the outcome arrow: the particle position
  is read out exactly, and the final outcome gates on it; matches the
  restricted table.
* ``c``   — pure setting with the parameter arrow: the final outcome flips
  its noise convention when the third box is checked; matches the full
  table including choice 3.
* ``d``   — realist setting with the parameter arrow: case ``c`` with the
  position made explicit and equated to the common cause.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence, Union

from .behavior import Behavior, format_fraction, parse_fraction
from .dag import DagVariant, build
from .errors import UndefinedConditionalError

# Fixed value ranges for endogenous nodes: binary outcomes, three positions.
NODE_SUPPORTS: Mapping[str, tuple[int, ...]] = {"M1": (0, 1), "M2": (0, 1), "V": (1, 2, 3)}

RationalLike = Union[Fraction, int]


@dataclass(frozen=True)
class ExogenousVar:
    """A named finite distribution; weights are exact and sum to one."""

    name: str
    support: tuple[int, ...]
    weights: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.support) != len(self.weights):
            raise ValueError(f"{self.name}: support and weights differ in length")
        if len(set(self.support)) != len(self.support):
            raise ValueError(f"{self.name}: support values must be distinct")
        if any(w < 0 for w in self.weights):
            raise ValueError(f"{self.name}: weights must be nonnegative")
        if sum(self.weights, Fraction(0)) != 1:
            raise ValueError(f"{self.name}: weights must sum to 1 exactly")


def bernoulli(name: str, p: RationalLike) -> ExogenousVar:
    """Binary variable on {0, 1} with P(1) = p."""
    q = Fraction(p)
    return ExogenousVar(name, (0, 1), (1 - q, q))


def uniform(name: str, values: Iterable[int]) -> ExogenousVar:
    vals = tuple(values)
    w = Fraction(1, len(vals))
    return ExogenousVar(name, vals, (w,) * len(vals))


class Expr:
    """Base class for the structural-equation expression vocabulary."""

    def evaluate(self, env: Mapping[str, int]) -> int:
        raise NotImplementedError

    def free_vars(self) -> frozenset[str]:
        raise NotImplementedError


@dataclass(frozen=True)
class Var(Expr):
    name: str

    def evaluate(self, env: Mapping[str, int]) -> int:
        return env[self.name]

    def free_vars(self) -> frozenset[str]:
        return frozenset({self.name})


@dataclass(frozen=True)
class Const(Expr):
    value: int

    def evaluate(self, env: Mapping[str, int]) -> int:
        return self.value

    def free_vars(self) -> frozenset[str]:
        return frozenset()


@dataclass(frozen=True)
class Delta(Expr):
    """Kronecker delta: 1 when both operands agree, else 0."""

    left: Expr
    right: Expr

    def evaluate(self, env: Mapping[str, int]) -> int:
        return 1 if self.left.evaluate(env) == self.right.evaluate(env) else 0

    def free_vars(self) -> frozenset[str]:
        return self.left.free_vars() | self.right.free_vars()


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr

    def evaluate(self, env: Mapping[str, int]) -> int:
        return self.left.evaluate(env) * self.right.evaluate(env)

    def free_vars(self) -> frozenset[str]:
        return self.left.free_vars() | self.right.free_vars()


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr

    def evaluate(self, env: Mapping[str, int]) -> int:
        return self.left.evaluate(env) + self.right.evaluate(env)

    def free_vars(self) -> frozenset[str]:
        return self.left.free_vars() | self.right.free_vars()


@dataclass(frozen=True)
class OneMinus(Expr):
    inner: Expr

    def evaluate(self, env: Mapping[str, int]) -> int:
        return 1 - self.inner.evaluate(env)

    def free_vars(self) -> frozenset[str]:
        return self.inner.free_vars()


@dataclass(frozen=True)
class ChoiceCases(Expr):
    """Piecewise expression keyed on the value of the choice ``C``."""

    cases: tuple[tuple[tuple[int, ...], Expr], ...]

    def evaluate(self, env: Mapping[str, int]) -> int:
        c = env["C"]
        for values, expr in self.cases:
            if c in values:
                return expr.evaluate(env)
        raise ValueError(f"no branch covers choice C={c}")

    def free_vars(self) -> frozenset[str]:
        out = frozenset({"C"})
        for _, expr in self.cases:
            out |= expr.free_vars()
        return out


@dataclass(frozen=True)
class StructuralEquation:
    """A total deterministic map from input tuples to a node value."""

    target: str
    inputs: tuple[str, ...]
    table: Mapping[tuple[int, ...], int]

    def __post_init__(self) -> None:
        if len(set(self.inputs)) != len(self.inputs):
            raise ValueError(f"{self.target}: duplicate inputs")
        object.__setattr__(self, "table", MappingProxyType(dict(self.table)))

    @classmethod
    def compile(cls, target: str, inputs: Sequence[str], expr: Expr,
                supports: Mapping[str, tuple[int, ...]]) -> "StructuralEquation":
        inputs = tuple(inputs)
        missing = expr.free_vars() - set(inputs)
        if missing:
            raise ValueError(f"{target}: expression uses undeclared inputs {sorted(missing)}")
        unknown = [n for n in inputs if n not in supports]
        if unknown:
            raise ValueError(f"{target}: no known support for inputs {unknown}")
        table = {
            args: expr.evaluate(dict(zip(inputs, args)))
            for args in product(*(supports[n] for n in inputs))
        }
        return cls(target=target, inputs=inputs, table=table)

    def value(self, args: tuple[int, ...]) -> int:
        try:
            return self.table[args]
        except KeyError:
            raise ValueError(f"{self.target}: inputs {args} outside the equation's domain") from None

    def evaluate(self, env: Mapping[str, int]) -> int:
        return self.value(tuple(env[name] for name in self.inputs))


class Scm:
    """A DAG variant, exogenous distributions, and structural equations.

    Construction verifies the model against its DAG: every node with
    parents carries exactly one equation, every parentless latent node is
    declared exogenous, equation inputs that are graph nodes must be
    parents of the target, and the remaining inputs must be declared
    exogenous noise.  The choice ``C`` is a free input swept over its
    support, not a weighted exogenous variable.
    """

    def __init__(self, variant: DagVariant, exogenous: Sequence[ExogenousVar],
                 equations: Sequence[StructuralEquation],
                 choices: tuple[int, ...] = (1, 2, 3)) -> None:
        self.variant = variant
        self.graph = build(variant)
        self.exogenous = tuple(exogenous)
        self.choices = tuple(sorted(choices))
        if not self.choices or any(k not in (1, 2, 3) for k in self.choices):
            raise ValueError(f"choices must be a nonempty subset of (1, 2, 3), got {choices}")

        names = [v.name for v in self.exogenous]
        if len(set(names)) != len(names):
            raise ValueError("duplicate exogenous variable names")
        self._exo_by_name = {v.name: v for v in self.exogenous}

        graph_nodes = set(self.graph.node_names)
        endogenous = {n for n in graph_nodes if self.graph.parents(n)}
        eq_targets = [eq.target for eq in equations]
        if len(set(eq_targets)) != len(eq_targets):
            raise ValueError("duplicate structural equations for one node")
        if set(eq_targets) != endogenous:
            raise ValueError(
                f"equations must cover exactly the nodes with parents: "
                f"expected {sorted(endogenous)}, got {sorted(eq_targets)}"
            )
        for node in graph_nodes - endogenous - {"C"}:
            if node not in self._exo_by_name:
                raise ValueError(f"parentless latent node {node} needs an exogenous distribution")
        self.equations: Mapping[str, StructuralEquation] = MappingProxyType(
            {eq.target: eq for eq in equations})

        for eq in equations:
            parents = self.graph.parents(eq.target)
            for name in eq.inputs:
                if name in graph_nodes:
                    if name not in parents:
                        raise ValueError(
                            f"{eq.target}: input {name} is not a parent in the {variant.shorthand} DAG"
                        )
                elif name not in self._exo_by_name:
                    raise ValueError(f"{eq.target}: input {name} is neither a graph node nor exogenous")
            expected = set(product(*(self.support(n) for n in eq.inputs)))
            if set(eq.table) != expected:
                raise ValueError(f"{eq.target}: equation table is not total on its input space")
            allowed = set(NODE_SUPPORTS.get(eq.target, ()))
            if allowed and not set(eq.table.values()) <= allowed:
                raise ValueError(
                    f"{eq.target}: equation values {sorted(set(eq.table.values()))} "
                    f"outside the node's range {sorted(allowed)}"
                )

        self._endogenous_order = tuple(
            n for n in self.graph.topological_order() if n in endogenous)

    def support(self, name: str) -> tuple[int, ...]:
        """Value range of any variable: choice, exogenous, or endogenous."""
        if name == "C":
            return self.choices
        if name in self._exo_by_name:
            return self._exo_by_name[name].support
        if name in NODE_SUPPORTS:
            return NODE_SUPPORTS[name]
        raise ValueError(f"unknown variable {name!r}")

    @classmethod
    def from_expressions(cls, variant: DagVariant,
                         exogenous: Sequence[ExogenousVar],
                         equations: Sequence[tuple[str, Sequence[str], Expr]],
                         choices: tuple[int, ...] = (1, 2, 3)) -> "Scm":
        """Compile ``(target, inputs, expression)`` triples into an SCM."""
        supports = dict(NODE_SUPPORTS)
        supports["C"] = tuple(sorted(choices))
        for var in exogenous:
            supports[var.name] = var.support
        compiled = [
            StructuralEquation.compile(target, inputs, expr, supports)
            for target, inputs, expr in equations
        ]
        return cls(variant, exogenous, compiled, choices)


def enumerate_assignments(m: Scm, k: int) -> Iterable[tuple[dict[str, int], Fraction]]:
    """All full variable assignments for C=k with their exact weights.

    Yields one ``(assignment, weight)`` pair per exogenous tuple; the weight
    is the product of the exogenous weights (the variables are independent
    by construction) and the endogenous values are filled in topological
    order.
    """
    if k not in m.choices:
        raise ValueError(f"choice {k} not in SCM choices {m.choices}")
    exo_names = [v.name for v in m.exogenous]
    exo_rows = [tuple(zip(v.support, v.weights)) for v in m.exogenous]
    for combo in product(*exo_rows):
        weight = Fraction(1)
        env: dict[str, int] = {"C": k}
        for name, (value, w) in zip(exo_names, combo):
            env[name] = value
            weight *= w
        for node in m._endogenous_order:
            env[node] = m.equations[node].evaluate(env)
        yield env, weight


def induced_behavior(m: Scm, choices: Iterable[int] | None = None) -> Behavior:
    """Exact behavior table from full enumeration, one column per choice."""
    kept = tuple(sorted(set(choices))) if choices is not None else m.choices
    if not kept:
        raise ValueError("need at least one choice")
    foreign = [k for k in kept if k not in m.choices]
    if foreign:
        raise ValueError(f"choices {foreign} outside the SCM's support {m.choices}")
    table: dict[tuple[int, int, int], Fraction] = {
        (i, j, k): Fraction(0) for k in kept for i in (0, 1) for j in (0, 1)
    }
    for k in kept:
        for env, weight in enumerate_assignments(m, k):
            key = (env["M1"], env["M2"], k)
            if key not in table:
                raise ValueError(f"equations produced out-of-range outcomes {key[:2]}")
            table[key] += weight
    return Behavior(choices=kept, table=table)


def postselected_conditional(m: Scm, k: int, i: int) -> Fraction:
    """P(M1=i | M2=1, C=k) of the induced behavior."""
    if i not in (0, 1):
        raise ValueError(f"outcome must be 0 or 1, got {i}")
    b = induced_behavior(m, (k,))
    denominator = b.prob(0, 1, k) + b.prob(1, 1, k)
    if denominator == 0:
        raise UndefinedConditionalError(
            f"induced post-selection probability is zero for choice {k}"
        )
    return b.prob(i, 1, k) / denominator


CATALOG_CASES = ("a", "b1", "c", "d")

_C = Var("C")
_LAMBDA = Var("Λ")
_N = Var("N")

# Final-outcome rule shared by cases c and d: for choices 1 and 2 the noise
# gates a hit, for choice 3 the convention flips on a miss.
_SWITCHED_M2 = ChoiceCases((
    ((1, 2), Mul(Delta(_C, _LAMBDA), _N)),
    ((3,), Add(Mul(OneMinus(Delta(_C, _LAMBDA)), OneMinus(_N)),
               Mul(Delta(_C, _LAMBDA), _N))),
))


def catalog(case: str) -> Scm:
    """One of the four built-in sufficiency constructions (a, b1, c, d)."""
    third = Fraction(1, 3)
    if case == "a":
        return Scm.from_expressions(
            DagVariant("pure"),
            exogenous=[bernoulli("Λ", third), bernoulli("N", third)],
            equations=[
                ("M1", ("C", "Λ"), _LAMBDA),
                ("M2", ("Λ", "N"), Mul(_LAMBDA, _N)),
            ],
        )
    if case == "b1":
        # M2 keeps Λ in its signature even though only the outcome and the
        # noise enter its value.
        return Scm.from_expressions(
            DagVariant("realist", outcome_arrow=True),
            exogenous=[uniform("Λ", (1, 2, 3)), bernoulli("N", third)],
            equations=[
                ("V", ("Λ",), _LAMBDA),
                ("M1", ("C", "V"), Delta(_C, Var("V"))),
                ("M2", ("M1", "Λ", "N"), Mul(Var("M1"), _N)),
            ],
        )
    if case == "c":
        return Scm.from_expressions(
            DagVariant("pure", parameter_arrow=True),
            exogenous=[uniform("Λ", (1, 2, 3)), bernoulli("N", third)],
            equations=[
                ("M1", ("C", "Λ"), Delta(_C, _LAMBDA)),
                ("M2", ("C", "Λ", "N"), _SWITCHED_M2),
            ],
        )
    if case == "d":
        return Scm.from_expressions(
            DagVariant("realist", parameter_arrow=True),
            exogenous=[uniform("Λ", (1, 2, 3)), bernoulli("N", third)],
            equations=[
                ("V", ("Λ",), _LAMBDA),
                ("M1", ("C", "V"), Delta(_C, Var("V"))),
                ("M2", ("C", "Λ", "N"), _SWITCHED_M2),
            ],
        )
    raise ValueError(f"unknown catalog case {case!r}; expected one of {CATALOG_CASES}")


def scm_to_json(m: Scm) -> str:
    """Serialise supports, weights, and compiled equation tables."""
    payload = {
        "variant": m.variant.shorthand,
        "choices": list(m.choices),
        "exogenous": [
            {
                "name": v.name,
                "support": list(v.support),
                "weights": [format_fraction(w) for w in v.weights],
            }
            for v in m.exogenous
        ],
        "equations": [
            {
                "target": eq.target,
                "inputs": list(eq.inputs),
                "table": {
                    ",".join(str(a) for a in args): value
                    for args, value in sorted(eq.table.items())
                },
            }
            for eq in (m.equations[t] for t in sorted(m.equations))
        ],
    }
    return json.dumps(payload, indent=2, ensure_ascii=False)


def scm_from_json(text: str) -> Scm:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"SCM is not valid JSON: {exc}") from None
    required = {"variant", "choices", "exogenous", "equations"}
    if not isinstance(payload, dict) or set(payload) != required:
        raise ValueError(f"SCM JSON must have exactly the keys {sorted(required)}")
    variant = DagVariant.from_shorthand(payload["variant"])
    exogenous = [
        ExogenousVar(
            name=entry["name"],
            support=tuple(entry["support"]),
            weights=tuple(parse_fraction(w) for w in entry["weights"]),
        )
        for entry in payload["exogenous"]
    ]
    equations = []
    for entry in payload["equations"]:
        table = {}
        for key, value in entry["table"].items():
            args = tuple(int(part) for part in key.split(",")) if key else ()
            table[args] = int(value)
        equations.append(StructuralEquation(
            target=entry["target"],
            inputs=tuple(entry["inputs"]),
            table=table,
        ))
    return Scm(variant, exogenous, equations, choices=tuple(payload["choices"]))
