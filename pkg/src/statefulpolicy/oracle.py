"""Exponential side-effect checks, for testing and small inputs only.

``check_acs_all_subsets`` enumerates every subset of the stateful backflows;
``check_acs_union_bound`` and ``check_acs_singletons`` are two of its
consequences. :func:`statefulpolicy.compliance.check_acs_efficient` implies all three.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .compliance import check_acs_efficient, check_ifs
from .errors import OracleLimitExceeded
from .framework import (
    DEFAULT_ORACLE_LIMIT,
    SecurityInvariant,
    get_acs,
    get_offending_flows,
    offending_flows_bruteforce,
    union_of,
)
from .graph import DirectedPolicy, StatefulPolicy, alpha, backflows


def _base(policy: StatefulPolicy) -> DirectedPolicy:
    alpha(policy)  # validates
    return DirectedPolicy._trusted(policy.nodes, policy.flows | policy.stateful)


def check_acs_all_subsets(
    policy: StatefulPolicy,
    invariants: Sequence[SecurityInvariant],
    limit: int = DEFAULT_ORACLE_LIMIT,
) -> bool:
    """For every X within the stateful backflows, ACS offending sets on flows + X lie in X."""
    base = _base(policy)
    back = sorted(backflows(policy.stateful))
    if len(back) > limit:
        raise OracleLimitExceeded(len(back), limit)
    acs = get_acs(invariants)
    for size in range(len(back) + 1):
        for combo in itertools.combinations(back, size):
            x = frozenset(combo)
            g = base._sub(base.edges | x)
            if any(not f <= x for f in get_offending_flows(acs, g)):
                return False
    return True


def check_acs_union_bound(policy: StatefulPolicy, invariants: Sequence[SecurityInvariant]) -> bool:
    """All ACS offending flows on ``alpha(policy)`` are stateful backflows."""
    union = union_of(get_offending_flows(get_acs(invariants), alpha(policy)))
    return union <= backflows(policy.stateful)


def check_acs_singletons(policy: StatefulPolicy, invariants: Sequence[SecurityInvariant]) -> bool:
    """Each stateful backflow added on its own violates at most itself."""
    base = _base(policy)
    acs = get_acs(invariants)
    for b in sorted(backflows(policy.stateful)):
        g = base._sub(base.edges | {b})
        if not union_of(get_offending_flows(acs, g)) <= {b}:
            return False
    return True


@dataclass(frozen=True)
class OracleReport:
    ifs: bool
    acs_efficient: bool
    acs_all_subsets: bool
    acs_union_bound: bool
    acs_singletons: bool
    bruteforce_agrees: bool

    @property
    def consistent(self) -> bool:
        """The efficient criterion must never pass where the exhaustive one fails."""
        implied = self.acs_all_subsets and self.acs_union_bound and self.acs_singletons
        return (not self.acs_efficient or self.acs_all_subsets) and (
            not self.acs_all_subsets or implied
        ) and self.bruteforce_agrees


def run_oracles(
    policy: StatefulPolicy,
    invariants: Sequence[SecurityInvariant],
    limit: int = DEFAULT_ORACLE_LIMIT,
) -> OracleReport:
    graph = alpha(policy)
    agrees = all(
        m.offending(graph) == offending_flows_bruteforce(m, graph, limit=limit) for m in invariants
    )
    return OracleReport(
        ifs=check_ifs(policy, invariants)[0],
        acs_efficient=check_acs_efficient(policy, invariants)[0],
        acs_all_subsets=check_acs_all_subsets(policy, invariants, limit=limit),
        acs_union_bound=check_acs_union_bound(policy, invariants),
        acs_singletons=check_acs_singletons(policy, invariants),
        bruteforce_agrees=agrees,
    )
