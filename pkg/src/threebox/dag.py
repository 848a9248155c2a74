"""Causal DAGs for the experiment and d-separation queries.

The variable set is fixed by the experiment: the free measurement choice
``C``, the intermediate outcome ``M1``, the final outcome ``M2``, a latent
common cause ``Λ``, and (under the realism assumption) a latent particle
position ``V``.  Eight DAG variants arise from the two settings (pure /
realist) crossed with the optional disturbance arrows ``M1→M2`` (outcome
dependence) and ``C→M2`` (parameter dependence).

A direct ``V→M2`` arrow is deliberately not part of the variant space: any
influence of the position on the final outcome can be absorbed into the
latent common cause feeding both.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Iterable

OBSERVED = "observed"
LATENT = "latent"

NODE_ORDER = ("C", "Λ", "V", "M1", "M2")

_NODE_ALIASES = {"L": "Λ", "lambda": "Λ", "Lambda": "Λ"}


def canonical_node(name: str) -> str:
    """Normalise a node name, accepting ASCII aliases for the latent Λ."""
    return _NODE_ALIASES.get(name, name)


def _node_key(name: str) -> tuple[int, str]:
    order = {n: i for i, n in enumerate(NODE_ORDER)}
    return order.get(name, len(NODE_ORDER)), name


@dataclass(frozen=True)
class CausalDag:
    """Nodes tagged observed/latent plus a set of arrows; always acyclic."""

    nodes: tuple[tuple[str, str], ...]
    arrows: tuple[tuple[str, str], ...]

    def __post_init__(self) -> None:
        names = [name for name, _ in self.nodes]
        if len(set(names)) != len(names):
            raise ValueError("duplicate node names")
        for name, kind in self.nodes:
            if kind not in (OBSERVED, LATENT):
                raise ValueError(f"node {name} has unknown kind {kind!r}")
        name_set = set(names)
        for src, dst in self.arrows:
            if src not in name_set or dst not in name_set:
                raise ValueError(f"arrow {src}→{dst} references an unknown node")
            if src == dst:
                raise ValueError(f"self-loop on {src}")
        if len(set(self.arrows)) != len(self.arrows):
            raise ValueError("duplicate arrows")
        if "C" in name_set and any(dst == "C" for _, dst in self.arrows):
            raise ValueError("the free choice C cannot have incoming arrows")
        if self._has_cycle():
            raise ValueError("graph contains a directed cycle")
        object.__setattr__(
            self, "nodes",
            tuple(sorted(self.nodes, key=lambda nk: _node_key(nk[0]))))
        object.__setattr__(
            self, "arrows",
            tuple(sorted(self.arrows, key=lambda a: (_node_key(a[0]), _node_key(a[1])))))

    def _has_cycle(self) -> bool:
        indeg = {name: 0 for name, _ in self.nodes}
        for _, dst in self.arrows:
            indeg[dst] += 1
        queue = deque(n for n, d in indeg.items() if d == 0)
        seen = 0
        while queue:
            node = queue.popleft()
            seen += 1
            for src, dst in self.arrows:
                if src == node:
                    indeg[dst] -= 1
                    if indeg[dst] == 0:
                        queue.append(dst)
        return seen != len(self.nodes)

    @property
    def node_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.nodes)

    def kind(self, name: str) -> str:
        for n, k in self.nodes:
            if n == name:
                return k
        raise ValueError(f"unknown node {name!r}")

    def has_node(self, name: str) -> bool:
        return any(n == name for n, _ in self.nodes)

    def parents(self, name: str) -> frozenset[str]:
        if not self.has_node(name):
            raise ValueError(f"unknown node {name!r}")
        return frozenset(src for src, dst in self.arrows if dst == name)

    def children(self, name: str) -> frozenset[str]:
        if not self.has_node(name):
            raise ValueError(f"unknown node {name!r}")
        return frozenset(dst for src, dst in self.arrows if src == name)

    def ancestors(self, names: Iterable[str]) -> frozenset[str]:
        """All strict ancestors of the given nodes."""
        result: set[str] = set()
        frontier = deque(names)
        while frontier:
            node = frontier.popleft()
            for parent in self.parents(node):
                if parent not in result:
                    result.add(parent)
                    frontier.append(parent)
        return frozenset(result)

    def descendants(self, name: str) -> frozenset[str]:
        """All strict descendants of one node."""
        result: set[str] = set()
        frontier = deque([name])
        while frontier:
            node = frontier.popleft()
            for child in self.children(node):
                if child not in result:
                    result.add(child)
                    frontier.append(child)
        return frozenset(result)

    def topological_order(self) -> tuple[str, ...]:
        """Kahn's algorithm with ties broken by the canonical node order."""
        indeg = {name: len(self.parents(name)) for name, _ in self.nodes}
        ready = sorted((n for n, d in indeg.items() if d == 0), key=_node_key)
        out: list[str] = []
        while ready:
            node = ready.pop(0)
            out.append(node)
            for child in sorted(self.children(node), key=_node_key):
                indeg[child] -= 1
                if indeg[child] == 0:
                    ready.append(child)
            ready.sort(key=_node_key)
        return tuple(out)


PURE = "pure"
REALIST = "realist"


@dataclass(frozen=True)
class DagVariant:
    """A setting (pure/realist) plus the two optional disturbance arrows."""

    setting: str
    outcome_arrow: bool = False
    parameter_arrow: bool = False

    def __post_init__(self) -> None:
        if self.setting not in (PURE, REALIST):
            raise ValueError(f"setting must be '{PURE}' or '{REALIST}', got {self.setting!r}")

    @property
    def shorthand(self) -> str:
        suffix = ("o" if self.outcome_arrow else "") + ("p" if self.parameter_arrow else "")
        return f"{self.setting}+{suffix}" if suffix else self.setting

    @classmethod
    def from_shorthand(cls, text: str) -> "DagVariant":
        base, plus, suffix = text.partition("+")
        if base not in (PURE, REALIST) or (plus and suffix not in ("o", "p", "op")):
            raise ValueError(
                f"unknown variant {text!r}; expected one of {[v.shorthand for v in ALL_VARIANTS]}"
            )
        return cls(base, outcome_arrow="o" in suffix, parameter_arrow="p" in suffix)

    def red_arrows(self) -> frozenset[tuple[str, str]]:
        arrows = set()
        if self.outcome_arrow:
            arrows.add(("M1", "M2"))
        if self.parameter_arrow:
            arrows.add(("C", "M2"))
        return frozenset(arrows)


ALL_VARIANTS = tuple(
    DagVariant(setting, outcome_arrow=o, parameter_arrow=p)
    for setting in (PURE, REALIST)
    for o, p in ((False, False), (True, False), (False, True), (True, True))
)

_PURE_BASE = (("C", "M1"), ("Λ", "M1"), ("Λ", "M2"))
_REALIST_BASE = (("C", "M1"), ("V", "M1"), ("Λ", "V"), ("Λ", "M2"))


def build(variant: DagVariant) -> CausalDag:
    """The DAG for a variant: base arrows of its setting plus red arrows."""
    if variant.setting == PURE:
        nodes = (("C", OBSERVED), ("Λ", LATENT), ("M1", OBSERVED), ("M2", OBSERVED))
        base = _PURE_BASE
    else:
        nodes = (("C", OBSERVED), ("Λ", LATENT), ("V", LATENT),
                 ("M1", OBSERVED), ("M2", OBSERVED))
        base = _REALIST_BASE
    return CausalDag(nodes=nodes, arrows=tuple(base) + tuple(sorted(variant.red_arrows())))


def _check_query_nodes(g: CausalDag, x: str, y: str, given: frozenset[str]) -> None:
    for node in (x, y, *given):
        if not g.has_node(node):
            raise ValueError(f"unknown node {node!r}; graph nodes: {g.node_names}")
    if x in given or y in given:
        raise ValueError("query endpoints may not appear in the conditioning set")
    if x == y:
        raise ValueError("query endpoints must be distinct")


def d_separated(g: CausalDag, x: str, y: str, given: Iterable[str] = ()) -> bool:
    """Whether every path between ``x`` and ``y`` is blocked given ``given``.

    Uses the standard reachability formulation: a walk entering a node from
    a child may continue anywhere unless the node is conditioned on; a walk
    entering from a parent may continue to children unless conditioned on,
    and may bounce back to parents only if the node has itself or a
    descendant in the conditioning set (an opened collider).  Conditioning
    on latent nodes is permitted.
    """
    given_set = frozenset(canonical_node(n) for n in given)
    x, y = canonical_node(x), canonical_node(y)
    _check_query_nodes(g, x, y, given_set)
    opened = given_set | g.ancestors(given_set)  # nodes whose colliders pass

    FROM_CHILD, FROM_PARENT = "child", "parent"
    visited: set[tuple[str, str]] = set()
    frontier = deque([(x, FROM_CHILD)])
    while frontier:
        node, came_from = frontier.popleft()
        if (node, came_from) in visited:
            continue
        visited.add((node, came_from))
        if node == y:
            return False
        if came_from == FROM_CHILD and node not in given_set:
            for parent in g.parents(node):
                frontier.append((parent, FROM_CHILD))
            for child in g.children(node):
                frontier.append((child, FROM_PARENT))
        elif came_from == FROM_PARENT:
            if node not in given_set:
                for child in g.children(node):
                    frontier.append((child, FROM_PARENT))
            if node in opened:
                for parent in g.parents(node):
                    frontier.append((parent, FROM_CHILD))
    return True


@dataclass(frozen=True)
class Path:
    """A trail between two nodes with per-step arrow directions.

    ``forward[s]`` is True when step ``s`` follows an arrow
    ``nodes[s] → nodes[s+1]`` and False when it goes against one.
    """

    nodes: tuple[str, ...]
    forward: tuple[bool, ...]

    def render(self) -> str:
        parts = [self.nodes[0]]
        for step, node in enumerate(self.nodes[1:]):
            parts.append("→" if self.forward[step] else "←")
            parts.append(node)
        return "".join(parts)


def _path_is_active(g: CausalDag, path: Path, given: frozenset[str]) -> bool:
    for idx in range(1, len(path.nodes) - 1):
        node = path.nodes[idx]
        is_collider = path.forward[idx - 1] and not path.forward[idx]
        if is_collider:
            if node not in given and not (g.descendants(node) & given):
                return False
        elif node in given:
            return False
    return True


def open_paths(g: CausalDag, x: str, y: str, given: Iterable[str] = ()) -> tuple[Path, ...]:
    """All active trails from ``x`` to ``y`` given the conditioning set.

    Exhaustive enumeration over simple paths in the skeleton; the node set
    is tiny, so this doubles as an independent witness generator for
    :func:`d_separated` (separated iff no open path exists).
    """
    given_set = frozenset(canonical_node(n) for n in given)
    x, y = canonical_node(x), canonical_node(y)
    _check_query_nodes(g, x, y, given_set)

    neighbours: dict[str, list[tuple[str, bool]]] = {n: [] for n in g.node_names}
    for src, dst in g.arrows:
        neighbours[src].append((dst, True))
        neighbours[dst].append((src, False))

    found: list[Path] = []

    def walk(node: str, trail: list[str], directions: list[bool]) -> None:
        if node == y:
            found.append(Path(tuple(trail), tuple(directions)))
            return
        for nxt, forward in neighbours[node]:
            if nxt not in trail:
                walk(nxt, trail + [nxt], directions + [forward])

    walk(x, [x], [])
    active = [p for p in found if _path_is_active(g, p, given_set)]
    return tuple(sorted(active, key=lambda p: (len(p.nodes), p.nodes)))


@dataclass(frozen=True)
class Factor:
    """One conditional factor P(node | parents)."""

    node: str
    parents: tuple[str, ...]

    def render(self) -> str:
        return f"P({self.node}|{','.join(self.parents)})" if self.parents else f"P({self.node})"


@dataclass(frozen=True)
class Factorization:
    """Markov factorisation of a DAG with free inputs conditioned away.

    Parentless observed nodes (the choice ``C``) are treated as free inputs
    and appear only on the right of conditioning bars; every other node
    contributes one factor, and latent nodes are summed over in the rendered
    observational joint.
    """

    factors: tuple[Factor, ...]
    latents: tuple[str, ...]
    free_inputs: tuple[str, ...]
    observed_outputs: tuple[str, ...]

    def render(self) -> str:
        lhs = f"P({','.join(self.observed_outputs)}"
        lhs += f"|{','.join(self.free_inputs)})" if self.free_inputs else ")"
        product = " · ".join(f.render() for f in self.factors)
        if self.latents:
            product = f"Σ_{{{','.join(self.latents)}}} {product}"
        return f"{lhs} = {product}"


def markov_factorization(g: CausalDag) -> Factorization:
    """Factor list P(node | parents) in topological order, free inputs aside."""
    topo = g.topological_order()
    free = tuple(n for n in topo if g.kind(n) == OBSERVED and not g.parents(n))
    factors = tuple(
        Factor(node=n, parents=tuple(sorted(g.parents(n), key=_node_key)))
        for n in topo
        if n not in free
    )
    latents = tuple(n for n in topo if g.kind(n) == LATENT)
    outputs = tuple(n for n in topo if g.kind(n) == OBSERVED and n not in free)
    return Factorization(factors=factors, latents=latents,
                         free_inputs=free, observed_outputs=outputs)


def dag_to_json(g: CausalDag) -> str:
    payload = {
        "nodes": [{"name": name, "kind": kind} for name, kind in g.nodes],
        "arrows": [[src, dst] for src, dst in g.arrows],
    }
    return json.dumps(payload, indent=2, ensure_ascii=False)


def dag_from_json(text: str) -> CausalDag:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"DAG is not valid JSON: {exc}") from None
    if not isinstance(payload, dict) or set(payload) != {"nodes", "arrows"}:
        raise ValueError("DAG JSON must have exactly the keys 'nodes' and 'arrows'")
    nodes = []
    for entry in payload["nodes"]:
        if not isinstance(entry, dict) or set(entry) != {"name", "kind"}:
            raise ValueError(f"malformed node entry {entry!r}")
        nodes.append((canonical_node(entry["name"]), entry["kind"]))
    arrows = []
    for entry in payload["arrows"]:
        if not isinstance(entry, list) or len(entry) != 2:
            raise ValueError(f"malformed arrow entry {entry!r}")
        arrows.append((canonical_node(entry[0]), canonical_node(entry[1])))
    return CausalDag(nodes=tuple(nodes), arrows=tuple(arrows))
