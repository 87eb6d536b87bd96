"""Security invariants, offending flows, and the invariant contract checker."""

from __future__ import annotations

import enum
import itertools
import random
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .errors import OracleLimitExceeded
from .graph import DirectedPolicy, Edge

DEFAULT_ORACLE_LIMIT = 16

OffendingFlows = frozenset  # frozenset[frozenset[Edge]]


class Strategy(enum.Enum):
    IFS = "IFS"  # information flow: backflows must never violate
    ACS = "ACS"  # access control: violations confined to new backflows are tolerated


class SecurityInvariant:
    """A monotone predicate over directed policies.

    Subclasses implement :meth:`evaluate`. :meth:`offending` falls back to
    exhaustive enumeration; invariants with uniquely defined offending flows
    override it with a linear computation.
    """

    strategy: Strategy
    description: str = ""

    def evaluate(self, graph: DirectedPolicy) -> bool:
        raise NotImplementedError

    def offending(self, graph: DirectedPolicy) -> frozenset[frozenset[Edge]]:
        return offending_flows_bruteforce(self, graph)

    def __str__(self) -> str:
        return self.description or type(self).__name__


class PredicateInvariant(SecurityInvariant):
    """Wraps a plain ``DirectedPolicy -> bool`` function."""

    def __init__(
        self,
        predicate: Callable[[DirectedPolicy], bool],
        strategy: Strategy,
        description: str = "",
        oracle_limit: int = DEFAULT_ORACLE_LIMIT,
    ):
        self.predicate = predicate
        self.strategy = strategy
        self.description = description or getattr(predicate, "__name__", "predicate")
        self.oracle_limit = oracle_limit

    def evaluate(self, graph: DirectedPolicy) -> bool:
        return bool(self.predicate(graph))

    def offending(self, graph: DirectedPolicy) -> frozenset[frozenset[Edge]]:
        return offending_flows_bruteforce(self, graph, limit=self.oracle_limit)


def offending_flows_bruteforce(
    invariant: SecurityInvariant,
    graph: DirectedPolicy,
    limit: int = DEFAULT_ORACLE_LIMIT,
) -> frozenset[frozenset[Edge]]:
    """Enumerate every F subset of E with: not m(G), m(V, E - F), and each
    edge of F individually re-breaking m when put back.

    Makes no use of monotonicity, so it is a valid reference even for
    predicates that break the contract.
    """
    if invariant.evaluate(graph):
        return frozenset()
    edges = graph.sorted_edges()
    if len(edges) > limit:
        raise OracleLimitExceeded(len(edges), limit)
    all_edges = graph.edges
    found = []
    for size in range(len(edges) + 1):
        for combo in itertools.combinations(edges, size):
            removed = frozenset(combo)
            rest = all_edges - removed
            if not invariant.evaluate(graph._sub(rest)):
                continue
            if all(not invariant.evaluate(graph._sub(rest | {e})) for e in combo):
                found.append(removed)
    return frozenset(found)


def union_of(sets: Iterable[Iterable[Edge]]) -> frozenset[Edge]:
    out: set[Edge] = set()
    for s in sets:
        out.update(s)
    return frozenset(out)


def get_offending_flows(
    invariants: Sequence[SecurityInvariant], graph: DirectedPolicy
) -> frozenset[frozenset[Edge]]:
    """Union, as a set of sets, of each invariant's offending flows."""
    out: set[frozenset[Edge]] = set()
    for m in invariants:
        out |= m.offending(graph)
    return frozenset(out)


def get_ifs(invariants: Sequence[SecurityInvariant]) -> list[SecurityInvariant]:
    return [m for m in invariants if m.strategy is Strategy.IFS]


def get_acs(invariants: Sequence[SecurityInvariant]) -> list[SecurityInvariant]:
    return [m for m in invariants if m.strategy is Strategy.ACS]


def all_hold(invariants: Sequence[SecurityInvariant], graph: DirectedPolicy) -> bool:
    return all(m.evaluate(graph) for m in invariants)


@dataclass(frozen=True)
class ContractViolation:
    clause: str
    graph: DirectedPolicy
    detail: str = ""

    def __str__(self) -> str:
        edges = ", ".join(str(e) for e in self.graph.sorted_edges())
        text = f"{self.clause} fails on V={self.graph.sorted_nodes()} E={{{edges}}}"
        return f"{text}: {self.detail}" if self.detail else text


@dataclass(frozen=True)
class ContractReport:
    invariant: str
    graphs_checked: int
    counterexample: ContractViolation | None = None

    @property
    def ok(self) -> bool:
        return self.counterexample is None


def _random_subset(rng: random.Random, edges: Sequence[Edge]) -> frozenset[Edge]:
    return frozenset(e for e in edges if rng.random() < 0.5)


def check_invariant_contract(
    invariant: SecurityInvariant,
    samples: Iterable[DirectedPolicy],
    *,
    seed: int = 0,
    subset_trials: int = 4,
    oracle_limit: int = DEFAULT_ORACLE_LIMIT,
) -> ContractReport:
    """Test the invariant contract on each sample graph.

    Checked per sample: the empty-graph axiom, monotonicity on random edge
    subsets, monotonicity of the offending-flow union, narrowing of an upper
    bound on that union, the offending-set characterisation, and agreement of
    :meth:`SecurityInvariant.offending` with the brute-force definition. The
    first counterexample found is reported.
    """
    rng = random.Random(seed)
    checked = 0
    name = str(invariant)

    def fail(clause: str, g: DirectedPolicy, detail: str = "") -> ContractReport:
        return ContractReport(name, checked, ContractViolation(clause, g, detail))

    for g in samples:
        checked += 1
        edges = g.sorted_edges()
        empty = g._sub(frozenset())
        if not invariant.evaluate(empty):
            return fail("empty-graph axiom", empty)

        holds = invariant.evaluate(g)
        offending = invariant.offending(g)
        union = union_of(offending)

        reference = offending_flows_bruteforce(invariant, g, limit=oracle_limit)
        if offending != reference:
            return fail("offending flows = brute force", g, f"{_fmt(offending)} != {_fmt(reference)}")
        if holds != (not offending):
            return fail("offending empty iff invariant holds", g)
        for f in offending:
            if not f <= g.edges:
                return fail("offending set within edges", g, _fmt([f]))
            if not invariant.evaluate(g._sub(g.edges - f)):
                return fail("removing an offending set repairs", g, _fmt([f]))

        for _ in range(subset_trials):
            sub = g._sub(_random_subset(rng, edges))
            if holds and not invariant.evaluate(sub):
                return fail("monotonicity", g, f"violated on subset {_fmt([sub.edges])}")
            sub_union = union_of(invariant.offending(sub))
            if not sub_union <= union:
                return fail("offending union monotone", g, f"subset {_fmt([sub.edges])}")

            bound = union | _random_subset(rng, edges)
            removed = _random_subset(rng, edges)
            narrowed = union_of(invariant.offending(g._sub(g.edges - removed)))
            if not narrowed <= bound - removed:
                return fail(
                    "narrowed offending bound",
                    g,
                    f"bound {_fmt([bound])}, removed {_fmt([removed])}",
                )
    return ContractReport(name, checked)


def _fmt(sets: Iterable[Iterable[Edge]]) -> str:
    inner = ["{" + ",".join(str(e) for e in sorted(s)) + "}" for s in sets]
    return "{" + ",".join(sorted(inner)) + "}"
