import pytest
from hypothesis import given
from hypothesis import strategies as st

from statefulpolicy.errors import InvalidPolicyError, UnknownNodeError
from statefulpolicy.graph import (
    DirectedPolicy,
    Edge,
    StatefulPolicy,
    alpha,
    backflows,
    new_backflows,
    new_backflows_filtered,
    validate_stateful_against_policy,
)

NAMES = st.sampled_from(["A", "B", "C", "D"])
EDGES = st.frozensets(st.tuples(NAMES, NAMES), max_size=12)


@st.composite
def stateful_policies(draw):
    flows = draw(EDGES)
    stateful = draw(st.frozensets(st.sampled_from(sorted(flows)))) if flows else frozenset()
    return StatefulPolicy({"A", "B", "C", "D"}, flows, stateful)


def test_backflows_examples():
    assert backflows({("A", "B")}) == {("B", "A")}
    assert backflows(set()) == frozenset()
    assert backflows({("A", "B"), ("B", "A")}) == {("A", "B"), ("B", "A")}
    assert backflows({("A", "A")}) == {("A", "A")}


@given(EDGES)
def test_backflows_is_an_involution(edges):
    assert backflows(backflows(edges)) == edges


@given(EDGES)
def test_backflows_preserves_size(edges):
    assert len(backflows(edges)) == len(edges)


def test_directed_policy_rejects_dangling_edge():
    with pytest.raises(UnknownNodeError, match="'C'"):
        DirectedPolicy({"A", "B"}, [("A", "C")])


def test_directed_policy_rejects_empty_name():
    with pytest.raises(InvalidPolicyError):
        DirectedPolicy({""}, [])


def test_nodes_are_case_sensitive():
    with pytest.raises(UnknownNodeError):
        DirectedPolicy({"a"}, [("a", "A")])


def test_edges_are_normalised_and_deduplicated():
    g = DirectedPolicy("AB", [("A", "B"), Edge("A", "B")])
    assert g.edges == {Edge("A", "B")}
    assert all(type(e) is Edge for e in g.edges)


def test_alpha_trivial_is_identity():
    g = DirectedPolicy("ABC", [("A", "B"), ("C", "A")])
    assert alpha(StatefulPolicy.trivial(g)) == g


def test_alpha_single_stateful_edge():
    t = StatefulPolicy("AB", [("A", "B")], [("A", "B")])
    assert alpha(t) == DirectedPolicy("AB", [("A", "B"), ("B", "A")])


def test_alpha_building_automation():
    t = StatefulPolicy("ABC", [("B", "A"), ("B", "C")], [("B", "A")])
    assert alpha(t) == DirectedPolicy("ABC", [("B", "A"), ("B", "C"), ("A", "B")])


def test_alpha_rejects_invalid():
    with pytest.raises(InvalidPolicyError, match="stateful not subset of flows"):
        alpha(StatefulPolicy("AB", [("A", "B")], [("B", "A")]))
    with pytest.raises(InvalidPolicyError, match="unknown nodes"):
        alpha(StatefulPolicy("A", [("A", "B")]))


@given(stateful_policies())
def test_alpha_contains_flows_and_stateful_backflows(t):
    edges = alpha(t).edges
    assert t.flows <= edges
    assert backflows(t.stateful) <= edges


@given(EDGES)
def test_alpha_of_trivial_policy_is_the_policy(edges):
    g = DirectedPolicy({"A", "B", "C", "D"}, edges)
    assert alpha(StatefulPolicy.trivial(g)) == g


def test_new_backflows_examples():
    assert new_backflows(StatefulPolicy("AB", [("A", "B"), ("B", "A")], [("A", "B")])) == set()
    assert new_backflows(StatefulPolicy("AB", [("A", "B")], [("A", "B")])) == {("B", "A")}
    t = StatefulPolicy("ABC", [("B", "A"), ("B", "C")], [("B", "A"), ("B", "C")])
    # by hand: reversed stateful edges are (A,B), (C,B); neither is a flow
    assert new_backflows(t) == {("A", "B"), ("C", "B")}


@given(stateful_policies())
def test_new_backflows_formulations_agree(t):
    assert new_backflows(t) == new_backflows_filtered(t)


@given(stateful_policies())
def test_new_backflows_disjoint_from_flows(t):
    assert not new_backflows(t) & t.flows


class TestValidateAgainstPolicy:
    g = DirectedPolicy("AB", [("A", "B")])

    def test_trivial_accepted(self):
        result = validate_stateful_against_policy(StatefulPolicy.trivial(self.g), self.g)
        assert result.ok and result.reasons == ()

    def test_flows_outside_policy(self):
        t = StatefulPolicy("AB", [("A", "B"), ("B", "A")])
        result = validate_stateful_against_policy(t, self.g)
        assert not result
        assert "flows not subset of policy edges" in result.reasons

    def test_stateful_outside_flows(self):
        t = StatefulPolicy("AB", [], [("A", "B")])
        assert "stateful not subset of flows" in validate_stateful_against_policy(t, self.g).reasons

    def test_reports_every_problem(self):
        t = StatefulPolicy("ABC", [("A", "B"), ("C", "A"), ("A", "X")], [("B", "A")])
        reasons = validate_stateful_against_policy(t, self.g).reasons
        assert set(reasons) == {
            "flows reference unknown nodes",
            "stateful not subset of flows",
            "nodes differ from policy nodes",
            "flows not subset of policy edges",
        }
