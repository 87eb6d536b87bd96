"""Concrete configurable security invariants.

Whitelist, sink and confidentiality are *local*: each edge either violates
or not, independently of the rest of the graph, so the offending flows are
unique (the set of violating edges) and computed in one pass. Transitive
non-reachability is not local; its offending flows are the minimal edge sets
cutting every forbidden path.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

from .errors import InvalidPolicyError, UnknownNodeError
from .framework import SecurityInvariant, Strategy
from .graph import DirectedPolicy, Edge


@dataclass(frozen=True)
class WhitelistSpec:
    """Only ``allowed`` nodes (and ``protected`` itself) may send to ``protected``."""

    protected: str
    allowed: frozenset[str] = frozenset()
    kind = "whitelist"

    def __post_init__(self):
        object.__setattr__(self, "allowed", frozenset(self.allowed))

    def referenced_nodes(self) -> set[str]:
        return {self.protected, *self.allowed}


@dataclass(frozen=True)
class SinkSpec:
    """Nodes that must not send anything."""

    sinks: frozenset[str] = frozenset()
    kind = "sink"

    def __post_init__(self):
        object.__setattr__(self, "sinks", frozenset(self.sinks))

    def referenced_nodes(self) -> set[str]:
        return set(self.sinks)


@dataclass(frozen=True)
class ConfidentialitySpec:
    """Security levels with trusted (declassifying) nodes; unmapped nodes have level 0."""

    levels: Mapping[str, int] = field(default_factory=dict)
    trusted: frozenset[str] = frozenset()
    kind = "confidentiality"

    def __post_init__(self):
        levels = dict(sorted(self.levels.items()))
        for node, level in levels.items():
            if isinstance(level, bool) or not isinstance(level, int) or level < 0:
                raise InvalidPolicyError(
                    f"security level of {node!r} must be a natural number, got {level!r}"
                )
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "trusted", frozenset(self.trusted))

    def __hash__(self):
        return hash((tuple(self.levels.items()), self.trusted))

    def referenced_nodes(self) -> set[str]:
        return {*self.levels, *self.trusted}


@dataclass(frozen=True)
class TransitiveNoAccessSpec:
    """For each pair ``(a, c)``, ``a`` must not reach ``c`` along any path."""

    forbidden: frozenset[tuple[str, str]] = frozenset()
    kind = "transitive_no_access"

    def __post_init__(self):
        pairs = frozenset(tuple(p) for p in self.forbidden)
        for a, c in pairs:
            if a == c:
                raise InvalidPolicyError(f"reflexive forbidden pair ({a!r}, {a!r})")
        object.__setattr__(self, "forbidden", pairs)

    def referenced_nodes(self) -> set[str]:
        return {n for pair in self.forbidden for n in pair}


InvariantSpec = Union[WhitelistSpec, SinkSpec, ConfidentialitySpec, TransitiveNoAccessSpec]


class LocalInvariant(SecurityInvariant):
    """An invariant decided edge by edge."""

    spec: InvariantSpec

    def violates(self, edge: Edge) -> bool:
        raise NotImplementedError

    def violations(self, graph: DirectedPolicy) -> frozenset[Edge]:
        return frozenset(e for e in graph.edges if self.violates(e))

    def evaluate(self, graph: DirectedPolicy) -> bool:
        return not any(self.violates(e) for e in graph.edges)

    def offending(self, graph: DirectedPolicy) -> frozenset[frozenset[Edge]]:
        bad = self.violations(graph)
        return frozenset([bad]) if bad else frozenset()

    def __eq__(self, other):
        return type(self) is type(other) and self.spec == other.spec

    def __hash__(self):
        return hash((type(self), self.spec))

    def __repr__(self):
        return f"{type(self).__name__}({self.spec!r})"


class Whitelist(LocalInvariant):
    strategy = Strategy.ACS

    def __init__(self, spec: WhitelistSpec):
        self.spec = spec
        self._permitted = spec.allowed | {spec.protected}
        allowed = ", ".join(sorted(spec.allowed)) or "nobody"
        self.description = f"whitelist: {spec.protected} accessible only by {allowed}"

    def violates(self, edge: Edge) -> bool:
        return edge[1] == self.spec.protected and edge[0] not in self._permitted


class Sink(LocalInvariant):
    strategy = Strategy.IFS

    def __init__(self, spec: SinkSpec):
        self.spec = spec
        self.description = f"sink: {', '.join(sorted(spec.sinks)) or 'none'} must not send"

    def violates(self, edge: Edge) -> bool:
        return edge[0] in self.spec.sinks


class Confidentiality(LocalInvariant):
    strategy = Strategy.IFS

    def __init__(self, spec: ConfidentialitySpec):
        self.spec = spec
        self.description = "confidentiality: " + (
            ", ".join(f"{n}={lvl}" for n, lvl in spec.levels.items()) or "no levels"
        ) + (f"; trusted {', '.join(sorted(spec.trusted))}" if spec.trusted else "")

    def source_level(self, node: str) -> int:
        # Trusted nodes declassify whatever they forward.
        return 0 if node in self.spec.trusted else self.spec.levels.get(node, 0)

    def destination_level(self, node: str) -> float:
        return math.inf if node in self.spec.trusted else self.spec.levels.get(node, 0)

    def violates(self, edge: Edge) -> bool:
        return self.source_level(edge[0]) > self.destination_level(edge[1])


def transitive_closure_reachable(graph: DirectedPolicy, start: str) -> set[str]:
    """Nodes reachable from ``start`` by one or more edges.

    ``start`` is included only when it lies on a cycle.
    """
    if start not in graph.nodes:
        raise UnknownNodeError(start)
    adj = graph.successors()
    seen: set[str] = set()
    queue = deque(adj[start])
    while queue:
        n = queue.popleft()
        if n in seen:
            continue
        seen.add(n)
        queue.extend(adj[n] - seen)
    return seen


class TransitiveNoAccess(SecurityInvariant):
    strategy = Strategy.ACS

    def __init__(self, spec: TransitiveNoAccessSpec):
        self.spec = spec
        self._pairs = sorted(spec.forbidden)
        pairs = ", ".join(f"{a}->*{c}" for a, c in self._pairs) or "none"
        self.description = f"transitive no access: {pairs}"

    def evaluate(self, graph: DirectedPolicy) -> bool:
        adj = graph.successors()
        reach: dict[str, set[str]] = {}
        for a, c in self._pairs:
            if a not in reach:
                reach[a] = _reachable(adj, a)
            if c in reach[a]:
                return False
        return True

    def offending(self, graph: DirectedPolicy) -> frozenset[frozenset[Edge]]:
        """Minimal transversals of the set of simple forbidden paths.

        An edge set restores the invariant iff it meets every simple path
        from ``a`` to ``c`` for each forbidden pair; the offending flows are
        the inclusion-minimal such sets.
        """
        paths: set[frozenset[Edge]] = set()
        adj = {n: sorted(s) for n, s in graph.successors().items()}
        for a, c in self._pairs:
            paths.update(_simple_paths(adj, a, c))
        if not paths:
            return frozenset()
        return _minimal_transversals(paths)

    def __eq__(self, other):
        return type(self) is type(other) and self.spec == other.spec

    def __hash__(self):
        return hash((type(self), self.spec))

    def __repr__(self):
        return f"{type(self).__name__}({self.spec!r})"


def _reachable(adj: Mapping[str, Iterable[str]], start: str) -> set[str]:
    seen: set[str] = set()
    stack = list(adj[start])
    while stack:
        n = stack.pop()
        if n not in seen:
            seen.add(n)
            stack.extend(adj[n])
    return seen


def _simple_paths(adj: Mapping[str, list[str]], src: str, dst: str) -> list[frozenset[Edge]]:
    out: list[frozenset[Edge]] = []
    path: list[Edge] = []
    on_path = {src}

    def walk(node: str) -> None:
        for nxt in adj[node]:
            if nxt == dst:
                out.append(frozenset(path + [Edge(node, nxt)]))
            elif nxt not in on_path:
                on_path.add(nxt)
                path.append(Edge(node, nxt))
                walk(nxt)
                path.pop()
                on_path.discard(nxt)

    walk(src)
    return out


def _minimal_transversals(hyperedges: Iterable[frozenset[Edge]]) -> frozenset[frozenset[Edge]]:
    # Berge's incremental algorithm.
    transversals: set[frozenset[Edge]] = {frozenset()}
    for h in sorted(hyperedges, key=lambda s: (len(s), sorted(s))):
        grown: set[frozenset[Edge]] = set()
        for t in transversals:
            if t & h:
                grown.add(t)
            else:
                grown.update(t | {e} for e in h)
        transversals = {t for t in grown if not any(o < t for o in grown)}
    return frozenset(transversals)


def build_invariant(spec: InvariantSpec, graph: DirectedPolicy) -> SecurityInvariant:
    """Instantiate ``spec`` for ``graph``; every referenced node must exist."""
    for node in sorted(spec.referenced_nodes()):
        if node not in graph.nodes:
            raise UnknownNodeError(node, f"{spec.kind} invariant")
    if isinstance(spec, WhitelistSpec):
        return Whitelist(spec)
    if isinstance(spec, SinkSpec):
        return Sink(spec)
    if isinstance(spec, ConfidentialitySpec):
        return Confidentiality(spec)
    if isinstance(spec, TransitiveNoAccessSpec):
        return TransitiveNoAccess(spec)
    raise InvalidPolicyError(f"unknown invariant kind {type(spec).__name__}")
