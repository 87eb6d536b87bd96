"""Directed policies, stateful policies and their directed interpretation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from .errors import InvalidPolicyError, UnknownNodeError


class Edge(NamedTuple):
    """A permitted flow from ``src`` to ``dst``."""

    src: str
    dst: str

    def reversed(self) -> Edge:
        return Edge(self.dst, self.src)

    def __str__(self) -> str:
        return f"({self.src},{self.dst})"


def as_edges(edges: Iterable[tuple[str, str]]) -> frozenset[Edge]:
    return frozenset(Edge(s, r) for s, r in edges)


def backflows(edges: Iterable[tuple[str, str]]) -> frozenset[Edge]:
    """Reverse every edge: ``{(r, s) | (s, r) in edges}``."""
    return frozenset(Edge(r, s) for s, r in edges)


def sorted_edges(edges: Iterable[tuple[str, str]]) -> list[Edge]:
    return sorted(as_edges(edges))


def _check_node_name(name: object) -> None:
    if not isinstance(name, str) or not name:
        raise InvalidPolicyError(f"node identifier must be non-empty text, got {name!r}")


@dataclass(frozen=True)
class DirectedPolicy:
    """A finite directed graph ``(V, E)``; every edge endpoint must be a node."""

    nodes: frozenset[str]
    edges: frozenset[Edge] = field(default_factory=frozenset)

    def __init__(self, nodes: Iterable[str], edges: Iterable[tuple[str, str]] = ()):
        nodes = frozenset(nodes)
        edges = as_edges(edges)
        for n in nodes:
            _check_node_name(n)
        for e in edges:
            for endpoint in e:
                if endpoint not in nodes:
                    raise UnknownNodeError(endpoint, f"edge {e}")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", edges)

    @classmethod
    def _trusted(cls, nodes: frozenset[str], edges: frozenset[Edge]) -> DirectedPolicy:
        # Skips validation; callers guarantee edges only mention nodes.
        g = object.__new__(cls)
        object.__setattr__(g, "nodes", nodes)
        object.__setattr__(g, "edges", edges)
        return g

    def with_edges(self, edges: Iterable[tuple[str, str]]) -> DirectedPolicy:
        return DirectedPolicy(self.nodes, edges)

    def _sub(self, edges: frozenset[Edge]) -> DirectedPolicy:
        # For edge sets already known to lie within this node set.
        return DirectedPolicy._trusted(self.nodes, edges)

    def successors(self) -> dict[str, set[str]]:
        adj: dict[str, set[str]] = {n: set() for n in self.nodes}
        for s, r in self.edges:
            adj[s].add(r)
        return adj

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def sorted_nodes(self) -> list[str]:
        return sorted(self.nodes)


@dataclass(frozen=True)
class StatefulPolicy:
    """The triple ``(V, flows, stateful)``.

    Construction does not enforce validity so that malformed inputs can be
    reported in full; see :meth:`syntax_errors` and
    :func:`validate_stateful_against_policy`.
    """

    nodes: frozenset[str]
    flows: frozenset[Edge]
    stateful: frozenset[Edge]

    def __init__(
        self,
        nodes: Iterable[str],
        flows: Iterable[tuple[str, str]],
        stateful: Iterable[tuple[str, str]] = (),
    ):
        object.__setattr__(self, "nodes", frozenset(nodes))
        object.__setattr__(self, "flows", as_edges(flows))
        object.__setattr__(self, "stateful", as_edges(stateful))

    @classmethod
    def trivial(cls, policy: DirectedPolicy) -> StatefulPolicy:
        """``(V, E, {})``: nothing upgraded."""
        return cls(policy.nodes, policy.edges, ())

    def syntax_errors(self) -> list[str]:
        errors = []
        if any(not isinstance(n, str) or not n for n in self.nodes):
            errors.append("node identifiers must be non-empty text")
        if any(s not in self.nodes or r not in self.nodes for s, r in self.flows):
            errors.append("flows reference unknown nodes")
        if any(s not in self.nodes or r not in self.nodes for s, r in self.stateful):
            errors.append("stateful flows reference unknown nodes")
        if not self.stateful <= self.flows:
            errors.append("stateful not subset of flows")
        return errors

    def is_valid(self) -> bool:
        return not self.syntax_errors()


def alpha(policy: StatefulPolicy) -> DirectedPolicy:
    """Interpret a stateful policy as the directed graph flows + stateful + backflows(stateful)."""
    errors = policy.syntax_errors()
    if errors:
        raise InvalidPolicyError("stateful policy is not syntactically valid: " + "; ".join(errors))
    edges = policy.flows | policy.stateful | backflows(policy.stateful)
    return DirectedPolicy._trusted(policy.nodes, edges)


def new_backflows(policy: StatefulPolicy) -> frozenset[Edge]:
    """Backflows of stateful edges that are not already permitted as flows."""
    return backflows(policy.stateful) - policy.flows


def new_backflows_filtered(policy: StatefulPolicy) -> frozenset[Edge]:
    # Equivalent formulation: reverse only those stateful edges whose reverse is not a flow.
    return backflows(e for e in policy.stateful if e.reversed() not in policy.flows)


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    reasons: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def validate_stateful_against_policy(
    policy: StatefulPolicy, graph: DirectedPolicy
) -> ValidationResult:
    """Check that ``policy`` is a syntactically valid stateful version of ``graph``.

    Every violated condition is listed in ``reasons``.
    """
    reasons = list(policy.syntax_errors())
    if policy.nodes != graph.nodes:
        reasons.append("nodes differ from policy nodes")
    if not policy.flows <= graph.edges:
        reasons.append("flows not subset of policy edges")
    return ValidationResult(not reasons, tuple(reasons))
