"""Compliance of a stateful policy with a directed policy and its invariants.

Production checks are the information-flow criterion (every IFS invariant
holds on the interpreted graph) and the efficient access-control criterion
(every ACS violation on the interpreted graph is a newly added backflow).
Exhaustive side-effect checks live in :mod:`statefulpolicy.oracle`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .framework import SecurityInvariant, get_acs, get_ifs
from .graph import (
    DirectedPolicy,
    Edge,
    StatefulPolicy,
    alpha,
    new_backflows,
    validate_stateful_against_policy,
)

POLICY_NOT_VALID = "policy not valid"
NOT_SIDE_EFFECT_FREE = "not verifiable as side-effect-free"
IFS_VIOLATED = "information flow invariant violated"


@dataclass(frozen=True)
class Witness:
    """A failing invariant with one offending set and the part of it not covered."""

    invariant: str
    offending: frozenset[Edge]
    excess: frozenset[Edge]


@dataclass(frozen=True)
class ComplianceReport:
    syntactic_ok: bool
    ifs_ok: bool
    acs_efficient_ok: bool
    precondition_ok: bool = True
    violating_invariants: tuple[Witness, ...] = ()
    reasons: tuple[str, ...] = field(default=())

    @property
    def overall(self) -> bool:
        return self.precondition_ok and self.syntactic_ok and self.ifs_ok and self.acs_efficient_ok


def _first_offending_set(sets) -> frozenset[Edge]:
    return min(sets, key=lambda s: (len(s), sorted(s)))


def check_ifs(
    policy: StatefulPolicy, invariants: Sequence[SecurityInvariant]
) -> tuple[bool, list[Witness]]:
    """Every IFS invariant must hold on ``alpha(policy)``."""
    graph = alpha(policy)
    witnesses = []
    for m in get_ifs(invariants):
        if not m.evaluate(graph):
            offending = m.offending(graph)
            f = _first_offending_set(offending) if offending else frozenset()
            witnesses.append(Witness(str(m), f, f))
    return not witnesses, witnesses


def check_acs_efficient(
    policy: StatefulPolicy, invariants: Sequence[SecurityInvariant]
) -> tuple[bool, list[Witness]]:
    """Every ACS offending set on ``alpha(policy)`` must consist of new backflows only."""
    graph = alpha(policy)
    allowed = new_backflows(policy)
    witnesses = []
    for m in get_acs(invariants):
        bad = [f for f in m.offending(graph) if not f <= allowed]
        if bad:
            f = _first_offending_set(bad)
            witnesses.append(Witness(str(m), f, f - allowed))
    return not witnesses, witnesses


def verify(
    policy: StatefulPolicy,
    graph: DirectedPolicy,
    invariants: Sequence[SecurityInvariant],
) -> ComplianceReport:
    """Decide whether ``policy`` implements ``graph`` without security flaws.

    ``graph`` must itself satisfy every invariant; otherwise nothing else is
    examined and the report carries ``"policy not valid"``.
    """
    failing = [str(m) for m in invariants if not m.evaluate(graph)]
    if failing:
        return ComplianceReport(
            syntactic_ok=False,
            ifs_ok=False,
            acs_efficient_ok=False,
            precondition_ok=False,
            reasons=(POLICY_NOT_VALID, *(f"invariant fails on policy: {d}" for d in failing)),
        )

    validation = validate_stateful_against_policy(policy, graph)
    if not validation:
        return ComplianceReport(
            syntactic_ok=False,
            ifs_ok=False,
            acs_efficient_ok=False,
            reasons=validation.reasons,
        )

    ifs_ok, ifs_witnesses = check_ifs(policy, invariants)
    acs_ok, acs_witnesses = check_acs_efficient(policy, invariants)
    reasons = []
    if not ifs_ok:
        reasons.append(IFS_VIOLATED)
    if not acs_ok:
        reasons.append(NOT_SIDE_EFFECT_FREE)
    # ifs witnesses first, then acs; each in invariant-list order
    return ComplianceReport(
        syntactic_ok=True,
        ifs_ok=ifs_ok,
        acs_efficient_ok=acs_ok,
        violating_invariants=(*ifs_witnesses, *acs_witnesses),
        reasons=tuple(reasons),
    )
