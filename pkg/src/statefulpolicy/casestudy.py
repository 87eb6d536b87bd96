"""Synthetic policies shaped like a departmental SSH landscape.

One designated ``outside`` node stands for the world; the remaining hosts
form a mostly collaborating core. A few interior hosts are protected: only
the core hosts that the policy already lets in may access them, never the
outside. All invariants are whitelists, so no IFS invariants exist and the
ACS invariants are free of side effects.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from .compliance import verify
from .framework import SecurityInvariant
from .graph import DirectedPolicy, Edge, alpha, backflows
from .library import WhitelistSpec, build_invariant
from .synthesis import generate1, generate2

OUTSIDE = "outside"


def host_names(n: int) -> list[str]:
    width = len(str(n - 1))
    return [OUTSIDE] + [f"h{i:0{width}d}" for i in range(1, n)]


def generate_policy(
    n: int, k: int, *, seed: int = 1, protected: int = 3
) -> tuple[DirectedPolicy, list[SecurityInvariant]]:
    """A reproducible policy with ``n`` nodes, ``k`` edges and whitelist invariants.

    Self-loops are allowed, so up to ``n * n`` candidate edges exist, minus
    the outside's edges into protected hosts.
    """
    if n < 1:
        raise ValueError("need at least one node")
    rng = random.Random(seed)
    nodes = host_names(n)
    interior = nodes[1:]
    guarded = sorted(rng.sample(interior, min(protected, len(interior))))
    candidates = [
        Edge(s, r) for s in nodes for r in nodes if not (s == OUTSIDE and r in guarded)
    ]
    if k < 0 or k > len(candidates):
        raise ValueError(f"cannot place {k} edges: {len(candidates)} candidate edges for n={n}")
    edges = rng.sample(candidates, k)
    graph = DirectedPolicy(nodes, edges)
    invariants = []
    for p in guarded:
        allowed = {s for s, r in graph.edges if r == p and s != p}
        invariants.append(build_invariant(WhitelistSpec(p, allowed), graph))
    return graph, invariants


@dataclass
class CaseStudyResult:
    nodes: int
    edges: int
    invariants: int
    stateful: dict[str, int] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)
    verified: dict[str, bool] = field(default_factory=dict)
    full_graph: dict[str, bool] = field(default_factory=dict)
    generators_agree: bool = True


def run_case_study(
    graph: DirectedPolicy, invariants: list[SecurityInvariant]
) -> CaseStudyResult:
    """Time both generators and the verification of their output."""
    result = CaseStudyResult(len(graph.nodes), len(graph.edges), len(invariants))
    full = graph.edges | backflows(graph.edges)
    outputs = {}
    for name, gen in (("generate1", generate1), ("generate2", generate2)):
        t0 = time.perf_counter()
        policy = gen(graph, invariants)
        result.timings[name] = time.perf_counter() - t0
        t0 = time.perf_counter()
        report = verify(policy, graph, invariants)
        result.timings[f"verify_{name}"] = time.perf_counter() - t0
        result.stateful[name] = len(policy.stateful)
        result.verified[name] = report.overall
        result.full_graph[name] = alpha(policy).edges == full
        outputs[name] = policy.stateful
    result.generators_agree = outputs["generate1"] == outputs["generate2"]
    return result
