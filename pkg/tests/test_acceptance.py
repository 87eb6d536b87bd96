"""Acceptance criteria. Each test carries a ``criterion`` marker and the
terminal summary prints one PASS/FAIL line per criterion."""

from __future__ import annotations

import random
import statistics
import time

import pytest

from _gen import (
    FIXTURES,
    GOLDEN,
    KINDS,
    all_graphs,
    fixed_specs,
    node_names,
    nonempty_subsets,
    random_graph,
    random_spec,
    random_stateful,
    random_subset,
    random_valid_instance,
)
from statefulpolicy.casestudy import generate_policy, run_case_study
from statefulpolicy.compliance import check_acs_efficient, check_ifs, verify
from statefulpolicy.formats import emit_dot, emit_iptables, parse_policy, parse_stateful
from statefulpolicy.framework import check_invariant_contract, offending_flows_bruteforce
from statefulpolicy.graph import DirectedPolicy, Edge, StatefulPolicy, alpha, backflows
from statefulpolicy.library import TransitiveNoAccessSpec, build_invariant
from statefulpolicy.oracle import (
    check_acs_all_subsets,
    check_acs_singletons,
    check_acs_union_bound,
)
from statefulpolicy.synthesis import filter_acs, filter_ifs, generate1, generate2


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


@pytest.mark.criterion(1, "building automation offending flows and filter_acs")
def test_building_automation_exactness():
    with Timer() as t:
        g = DirectedPolicy("ABC", [("B", "A"), ("B", "C")])
        m = build_invariant(TransitiveNoAccessSpec({("A", "C")}), g)
        interpreted = alpha(StatefulPolicy(g.nodes, g.edges, [("B", "A")]))
        offending = offending_flows_bruteforce(m, interpreted)
        selected = filter_acs(g, [m], [Edge("B", "A"), Edge("B", "C")])
    assert offending == {frozenset({Edge("B", "C")}), frozenset({Edge("A", "B")})}
    assert selected == {Edge("B", "C")}
    assert t.elapsed < 1.0


@pytest.mark.criterion(2, "running example reproduction")
def test_running_example_reproduction():
    with Timer() as t:
        graph, invariants, order = parse_policy((FIXTURES / "running_example.policy").read_text())
        first = generate1(graph, invariants, order)
        second = generate2(graph, invariants, order)
        report = verify(first, graph, invariants)
    golden = parse_stateful((GOLDEN / "running_example.stateful").read_text())
    assert first.stateful == second.stateful == golden.stateful
    stateful = first.stateful
    assert not any(e.dst == "printer" for e in stateful)
    assert not any({e.src, e.dst} == {"students", "employees"} for e in stateful)
    assert {(s, r) for s in ("students", "employees") for r in ("internet", "webSrv")} <= stateful
    assert report.overall
    assert t.elapsed < 1.0


def _side_effect_instances(count: int, seed: int):
    rng = random.Random(seed)
    for i in range(count):
        graph, invariants = random_valid_instance(rng, 5, 8, min_nodes=3, min_edges=5)
        if i % 3 == 0:
            # subsets of a filter_acs result keep many instances on the passing side
            stateful = random_subset(rng, filter_acs(graph, invariants))
            yield StatefulPolicy(graph.nodes, graph.edges, stateful), invariants
        else:
            yield random_stateful(rng, graph), invariants


@pytest.mark.criterion(3, "efficient ACS check implies the exhaustive conditions")
def test_efficient_check_is_sound():
    counterexamples = []
    passing = 0
    with Timer() as t:
        for policy, invariants in _side_effect_instances(1200, seed=2024):
            if not check_acs_efficient(policy, invariants)[0]:
                continue
            passing += 1
            if not (
                check_acs_all_subsets(policy, invariants)
                and check_acs_union_bound(policy, invariants)
                and check_acs_singletons(policy, invariants)
            ):
                counterexamples.append(policy)
    assert counterexamples == []
    assert passing >= 300, "too few passing instances to be meaningful"
    assert t.elapsed < 120


@pytest.mark.criterion(4, "invariant contract suite")
def test_contract_suite():
    failures = []
    checked = 0
    with Timer() as t:
        for n in range(4):
            nodes = node_names(n)
            samples = list(all_graphs(n))
            for spec in fixed_specs(nodes):
                report = check_invariant_contract(build_invariant(spec, DirectedPolicy(nodes)), samples)
                checked += report.graphs_checked
                if not report.ok:
                    failures.append(report.counterexample)

        rng = random.Random(99)
        for i in range(600):
            nodes = node_names(rng.randint(2, 5))
            g = random_graph(rng, nodes, 12)
            spec = random_spec(rng, nodes, KINDS[i % len(KINDS)])
            report = check_invariant_contract(build_invariant(spec, g), [g], seed=i)
            checked += report.graphs_checked
            if not report.ok:
                failures.append(report.counterexample)
    assert failures == []
    assert checked > 5000
    assert t.elapsed < 120


@pytest.mark.criterion(5, "filter soundness and completeness")
def test_filter_soundness_and_completeness():
    rng = random.Random(555)
    failures = []
    exhaustive = 0
    with Timer() as t:
        for _ in range(600):
            graph, invariants = random_valid_instance(rng, 5, 8, min_nodes=3, min_edges=5)
            order = sorted(graph.edges)
            rng.shuffle(order)
            ifs = filter_ifs(graph, invariants, order)
            acs = filter_acs(graph, invariants, order)
            if not check_ifs(StatefulPolicy(graph.nodes, graph.edges, ifs), invariants)[0]:
                failures.append(("ifs sound", graph))
            if not check_acs_efficient(StatefulPolicy(graph.nodes, graph.edges, acs), invariants)[0]:
                failures.append(("acs sound", graph))
            if len(graph.edges) > 8:
                continue
            exhaustive += 1
            for x in nonempty_subsets(graph.edges - ifs):
                t_x = StatefulPolicy(graph.nodes, graph.edges, ifs | set(x))
                if check_ifs(t_x, invariants)[0]:
                    failures.append(("ifs complete", graph, x))
            for x in nonempty_subsets(graph.edges - acs - backflows(graph.edges)):
                t_x = StatefulPolicy(graph.nodes, graph.edges, acs | set(x))
                if check_acs_efficient(t_x, invariants)[0]:
                    failures.append(("acs complete", graph, x))
    assert failures == []
    assert exhaustive >= 500
    assert t.elapsed < 180


@pytest.mark.criterion(6, "whitelist-only policies admit every backflow")
def test_whitelist_only_admits_all_backflows():
    rng = random.Random(6)
    failures = []
    for _ in range(250):
        graph, invariants = random_valid_instance(rng, 5, 10, kinds=("whitelist",), min_nodes=2, min_edges=4)
        full = graph.edges | backflows(graph.edges)
        for gen in (generate1, generate2):
            if alpha(gen(graph, invariants, sorted(graph.edges))).edges != full:
                failures.append((gen.__name__, graph))
    assert failures == []


def _synthesis_time(n: int, k: int, seed: int) -> float:
    graph, invariants = generate_policy(n, k, seed=seed)
    t0 = time.perf_counter()
    generate1(graph, invariants)
    return time.perf_counter() - t0


@pytest.mark.criterion(7, "case study scale and growth")
def test_case_study_scale():
    graph, invariants = generate_policy(24, 496, seed=1)
    result = run_case_study(graph, invariants)
    assert (result.nodes, result.edges, result.invariants) == (24, 496, 3)
    assert result.timings["generate1"] < 10 and result.timings["generate2"] < 10
    assert result.timings["verify_generate1"] < 1 and result.timings["verify_generate2"] < 1
    assert all(result.verified.values()) and all(result.full_graph.values())
    assert result.generators_agree


@pytest.mark.criterion(7, "case study scale and growth")
def test_synthesis_growth_is_at_most_quadratic():
    small = statistics.median(_synthesis_time(32, 500, seed) for seed in range(5))
    large = statistics.median(_synthesis_time(32, 1000, seed) for seed in range(5))
    assert large / small <= 6.0, f"ratio {large / small:.2f}"


@pytest.mark.criterion(8, "iptables and DOT golden output")
def test_emitter_golden_files():
    assert emit_iptables(StatefulPolicy("AB", [("A", "B")], [("A", "B")])) == (
        GOLDEN / "fig1_stateful.iptables"
    ).read_text()
    assert emit_iptables(StatefulPolicy("AB", [("A", "B")], [])) == (
        GOLDEN / "fig2_stateless.iptables"
    ).read_text()
    g = DirectedPolicy("ABC", [("B", "A"), ("B", "C")])
    assert emit_dot(g, StatefulPolicy.trivial(g)) == (GOLDEN / "building_automation_trivial.dot").read_text()
    assert emit_dot(g, StatefulPolicy(g.nodes, g.edges, [("B", "C")])) == (
        GOLDEN / "building_automation_BC.dot"
    ).read_text()
    graph, invariants, order = parse_policy((FIXTURES / "running_example.policy").read_text())
    assert emit_dot(graph, generate1(graph, invariants, order)) == (GOLDEN / "running_example.dot").read_text()
