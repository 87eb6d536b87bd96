"""Verification and synthesis of stateful implementations of directed network security policies."""

from .compliance import ComplianceReport, check_acs_efficient, check_ifs, verify
from .errors import (
    InvalidPolicyError,
    OracleLimitExceeded,
    PolicyError,
    PolicyFormatError,
    UnknownNodeError,
)
from .framework import (
    PredicateInvariant,
    SecurityInvariant,
    Strategy,
    check_invariant_contract,
    get_acs,
    get_ifs,
    get_offending_flows,
    offending_flows_bruteforce,
)
from .graph import (
    DirectedPolicy,
    Edge,
    StatefulPolicy,
    alpha,
    backflows,
    new_backflows,
    validate_stateful_against_policy,
)
from .library import (
    ConfidentialitySpec,
    SinkSpec,
    TransitiveNoAccessSpec,
    WhitelistSpec,
    build_invariant,
    transitive_closure_reachable,
)
from .synthesis import filter_acs, filter_ifs, generate1, generate2

__all__ = [
    "ComplianceReport",
    "ConfidentialitySpec",
    "DirectedPolicy",
    "Edge",
    "InvalidPolicyError",
    "OracleLimitExceeded",
    "PolicyError",
    "PolicyFormatError",
    "PredicateInvariant",
    "SecurityInvariant",
    "SinkSpec",
    "StatefulPolicy",
    "Strategy",
    "TransitiveNoAccessSpec",
    "UnknownNodeError",
    "WhitelistSpec",
    "alpha",
    "backflows",
    "build_invariant",
    "check_acs_efficient",
    "check_ifs",
    "check_invariant_contract",
    "filter_acs",
    "filter_ifs",
    "generate1",
    "generate2",
    "get_acs",
    "get_ifs",
    "get_offending_flows",
    "new_backflows",
    "offending_flows_bruteforce",
    "transitive_closure_reachable",
    "validate_stateful_against_policy",
    "verify",
]
