"""Choosing which flows of a directed policy can be made stateful.

Both filters fold over a priority list of edges, keeping an accumulator of
accepted edges; an edge is accepted when the policy with it upgraded (on top
of everything accepted so far) still satisfies the relevant criterion.
Earlier edges win when candidates conflict.
"""

from __future__ import annotations

import logging
from typing import Iterable, Sequence

from .errors import InvalidPolicyError
from .framework import SecurityInvariant, all_hold, get_acs, get_ifs
from .graph import DirectedPolicy, Edge, StatefulPolicy, backflows

log = logging.getLogger(__name__)


def default_order(graph: DirectedPolicy) -> list[Edge]:
    return graph.sorted_edges()


def _check_inputs(
    graph: DirectedPolicy,
    invariants: Sequence[SecurityInvariant],
    order: Iterable[tuple[str, str]] | None,
) -> list[Edge]:
    if not all_hold(invariants, graph):
        failing = [str(m) for m in invariants if not m.evaluate(graph)]
        raise InvalidPolicyError("invalid policy: " + "; ".join(failing))
    if order is None:
        return default_order(graph)
    edges = [Edge(*e) for e in order]
    if len(set(edges)) != len(edges):
        raise ValueError("priority list contains duplicate edges")
    unknown = [e for e in edges if e not in graph.edges]
    if unknown:
        raise ValueError(f"priority list edge {unknown[0]} is not a policy edge")
    return edges


def _alpha_edges(graph: DirectedPolicy, stateful: Iterable[Edge]) -> DirectedPolicy:
    stateful = frozenset(stateful)
    return graph._sub(graph.edges | backflows(stateful))


def _filter_ifs(graph, invariants, order) -> list[Edge]:
    ifs = get_ifs(invariants)
    accepted: list[Edge] = []
    for e in order:
        candidate = _alpha_edges(graph, [e, *accepted])
        if all(m.evaluate(candidate) for m in ifs):
            accepted.append(e)
    return accepted


def _filter_acs(graph, invariants, order) -> list[Edge]:
    acs = get_acs(invariants)
    reverse = backflows(graph.edges)
    accepted: list[Edge] = []
    for e in order:
        if e in reverse:
            continue
        upgraded = [e, *accepted]
        candidate = _alpha_edges(graph, upgraded)
        tolerated = backflows(upgraded)
        if all(f <= tolerated for m in acs for f in m.offending(candidate)):
            accepted.append(e)
    return accepted


def filter_ifs(
    graph: DirectedPolicy,
    invariants: Sequence[SecurityInvariant],
    order: Iterable[tuple[str, str]] | None = None,
) -> frozenset[Edge]:
    """Edges whose backflows keep every IFS invariant satisfied, greedily by ``order``."""
    return frozenset(_filter_ifs(graph, invariants, _check_inputs(graph, invariants, order)))


def filter_acs(
    graph: DirectedPolicy,
    invariants: Sequence[SecurityInvariant],
    order: Iterable[tuple[str, str]] | None = None,
) -> frozenset[Edge]:
    """Edges whose backflows cause no ACS side effects, greedily by ``order``.

    Edges that are already bidirectional in ``graph`` are never selected.
    """
    return frozenset(_filter_acs(graph, invariants, _check_inputs(graph, invariants, order)))


def generate1(
    graph: DirectedPolicy,
    invariants: Sequence[SecurityInvariant],
    order: Iterable[tuple[str, str]] | None = None,
) -> StatefulPolicy:
    """Run the ACS filter over the survivors of the IFS filter."""
    edges = _check_inputs(graph, invariants, order)
    ifs_ok = set(_filter_ifs(graph, invariants, edges))
    survivors = [e for e in edges if e in ifs_ok]
    return StatefulPolicy(graph.nodes, graph.edges, _filter_acs(graph, invariants, survivors))


def generate2(
    graph: DirectedPolicy,
    invariants: Sequence[SecurityInvariant],
    order: Iterable[tuple[str, str]] | None = None,
) -> StatefulPolicy:
    """Intersect the results of both filters run independently."""
    edges = _check_inputs(graph, invariants, order)
    stateful = set(_filter_acs(graph, invariants, edges)) & set(_filter_ifs(graph, invariants, edges))
    return StatefulPolicy(graph.nodes, graph.edges, stateful)


GENERATORS = {"generate1": generate1, "generate2": generate2}


def compare_generators(
    graph: DirectedPolicy,
    invariants: Sequence[SecurityInvariant],
    order: Iterable[tuple[str, str]] | None = None,
) -> bool:
    """Run both generators and log whether they disagree. Returns True when equal."""
    order = None if order is None else list(order)
    first = generate1(graph, invariants, order)
    second = generate2(graph, invariants, order)
    if first.stateful != second.stateful:
        log.info(
            "generate1 and generate2 differ: only generate1 %s, only generate2 %s",
            sorted(first.stateful - second.stateful),
            sorted(second.stateful - first.stateful),
        )
        return False
    return True
