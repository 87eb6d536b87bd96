"""Policy and stateful-policy documents, plus DOT, iptables and report output.

Documents are JSON objects (files conventionally named ``*.policy`` and
``*.stateful``); see ``docs/format.md`` for the grammar.
"""

from __future__ import annotations

import json
import warnings
from typing import Any, Iterable, NamedTuple, Sequence

from .compliance import ComplianceReport
from .errors import PolicyError, PolicyFormatError
from .framework import SecurityInvariant
from .graph import DirectedPolicy, Edge, StatefulPolicy, new_backflows
from .library import (
    ConfidentialitySpec,
    InvariantSpec,
    SinkSpec,
    TransitiveNoAccessSpec,
    WhitelistSpec,
    build_invariant,
)

SUPPORTED_VERSION = 1

_POLICY_FIELDS = {"version", "nodes", "edges", "invariants", "priority"}
_STATEFUL_FIELDS = {"version", "nodes", "flows", "stateful"}
_INVARIANT_FIELDS = {
    "whitelist": ({"protected"}, {"allowed"}),
    "sink": ({"sinks"}, set()),
    "confidentiality": (set(), {"levels", "trusted"}),
    "transitive_no_access": ({"forbidden"}, set()),
}


class DuplicateEntryWarning(UserWarning):
    pass


class PolicyDocument(NamedTuple):
    graph: DirectedPolicy
    invariants: list[SecurityInvariant]
    priority: list[Edge]


def _load(text: str) -> dict[str, Any]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PolicyFormatError(exc.msg, line=exc.lineno) from None
    if not isinstance(doc, dict):
        raise PolicyFormatError("document must be an object")
    return doc


def _check_fields(obj: dict, required: set[str], optional: set[str], path: str) -> None:
    unknown = sorted(set(obj) - required - optional)
    if unknown:
        raise PolicyFormatError(f"unknown field {unknown[0]!r}", f"{path}.{unknown[0]}".lstrip("."))
    missing = sorted(required - set(obj))
    if missing:
        raise PolicyFormatError(f"missing field {missing[0]!r}", path or "document")


def _check_version(doc: dict) -> None:
    version = doc.get("version")
    if version != SUPPORTED_VERSION:
        raise PolicyFormatError(f"version unsupported: {version!r}", "version")


def _names(value: Any, path: str) -> list[str]:
    if not isinstance(value, list):
        raise PolicyFormatError("expected a list of names", path)
    for i, n in enumerate(value):
        if not isinstance(n, str) or not n:
            raise PolicyFormatError(f"expected a non-empty name, got {n!r}", f"{path}[{i}]")
    return value


def _dedup(items: list, path: str) -> list:
    seen: dict = {}
    for item in items:
        seen.setdefault(item, None)
    if len(seen) != len(items):
        warnings.warn(
            f"{path}: {len(items) - len(seen)} duplicate entries removed",
            DuplicateEntryWarning,
            stacklevel=3,
        )
    return list(seen)


def _edge_list(value: Any, path: str, nodes: set[str] | None) -> list[Edge]:
    if not isinstance(value, list):
        raise PolicyFormatError("expected a list of [src, dst] pairs", path)
    edges = []
    for i, pair in enumerate(value):
        where = f"{path}[{i}]"
        if not (isinstance(pair, list) and len(pair) == 2):
            raise PolicyFormatError("expected [src, dst]", where)
        for n in pair:
            if not isinstance(n, str) or not n:
                raise PolicyFormatError(f"expected a non-empty name, got {n!r}", where)
            if nodes is not None and n not in nodes:
                raise PolicyFormatError(f"unknown node {n!r}", where)
        edges.append(Edge(*pair))
    return edges


def _parse_spec(obj: Any, path: str) -> InvariantSpec:
    if not isinstance(obj, dict):
        raise PolicyFormatError("expected an invariant object", path)
    kind = obj.get("kind")
    if kind not in _INVARIANT_FIELDS:
        raise PolicyFormatError(f"unknown invariant kind {kind!r}", f"{path}.kind")
    required, optional = _INVARIANT_FIELDS[kind]
    _check_fields(obj, required | {"kind"}, optional, path)
    try:
        if kind == "whitelist":
            if not isinstance(obj["protected"], str):
                raise PolicyFormatError("expected a node name", f"{path}.protected")
            return WhitelistSpec(obj["protected"], _names(obj.get("allowed", []), f"{path}.allowed"))
        if kind == "sink":
            return SinkSpec(_names(obj["sinks"], f"{path}.sinks"))
        if kind == "confidentiality":
            levels = obj.get("levels", {})
            if not isinstance(levels, dict):
                raise PolicyFormatError("expected an object of node levels", f"{path}.levels")
            return ConfidentialitySpec(levels, _names(obj.get("trusted", []), f"{path}.trusted"))
        pairs = _edge_list(obj["forbidden"], f"{path}.forbidden", None)
        return TransitiveNoAccessSpec(pairs)
    except PolicyFormatError:
        raise
    except PolicyError as exc:
        raise PolicyFormatError(str(exc), path) from None


def parse_policy(text: str) -> PolicyDocument:
    """Parse a policy document into a graph, its invariants and a priority list.

    Without a ``priority`` field, edges are ordered lexicographically.
    """
    doc = _load(text)
    _check_fields(doc, {"version", "nodes", "edges"}, _POLICY_FIELDS, "")
    _check_version(doc)
    nodes = _dedup(_names(doc["nodes"], "nodes"), "nodes")
    edges = _dedup(_edge_list(doc["edges"], "edges", set(nodes)), "edges")
    graph = DirectedPolicy(nodes, edges)

    raw = doc.get("invariants", [])
    if not isinstance(raw, list):
        raise PolicyFormatError("expected a list of invariants", "invariants")
    invariants = []
    for i, obj in enumerate(raw):
        spec = _parse_spec(obj, f"invariants[{i}]")
        try:
            invariants.append(build_invariant(spec, graph))
        except PolicyError as exc:
            raise PolicyFormatError(str(exc), f"invariants[{i}]") from None

    if "priority" in doc:
        priority = _dedup(_edge_list(doc["priority"], "priority", set(nodes)), "priority")
        for i, e in enumerate(priority):
            if e not in graph.edges:
                raise PolicyFormatError(f"priority edge {e} is not a policy edge", f"priority[{i}]")
    else:
        priority = graph.sorted_edges()
    return PolicyDocument(graph, invariants, priority)


def parse_stateful(text: str) -> StatefulPolicy:
    """Parse a stateful document. Validity is left to the compliance checks."""
    doc = _load(text)
    _check_fields(doc, {"version", "nodes", "flows"}, _STATEFUL_FIELDS, "")
    _check_version(doc)
    nodes = _dedup(_names(doc["nodes"], "nodes"), "nodes")
    flows = _dedup(_edge_list(doc["flows"], "flows", None), "flows")
    stateful = _dedup(_edge_list(doc.get("stateful", []), "stateful", None), "stateful")
    return StatefulPolicy(nodes, flows, stateful)


def parse_priority(text: str) -> list[Edge]:
    """A standalone priority list: a JSON array of [src, dst] pairs."""
    try:
        value = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PolicyFormatError(exc.msg, line=exc.lineno) from None
    return _dedup(_edge_list(value, "priority", None), "priority")


def spec_to_dict(spec: InvariantSpec) -> dict[str, Any]:
    if isinstance(spec, WhitelistSpec):
        return {"kind": spec.kind, "protected": spec.protected, "allowed": sorted(spec.allowed)}
    if isinstance(spec, SinkSpec):
        return {"kind": spec.kind, "sinks": sorted(spec.sinks)}
    if isinstance(spec, ConfidentialitySpec):
        return {"kind": spec.kind, "levels": dict(spec.levels), "trusted": sorted(spec.trusted)}
    return {"kind": spec.kind, "forbidden": [list(p) for p in sorted(spec.forbidden)]}


def _j(value: Any) -> str:
    return json.dumps(value, ensure_ascii=False)


def _block(key: str, items: Sequence[str], last: bool = False) -> list[str]:
    tail = "" if last else ","
    if not items:
        return [f'  "{key}": []{tail}']
    body = [f"    {item}," for item in items[:-1]] + [f"    {items[-1]}"]
    return [f'  "{key}": [', *body, f"  ]{tail}"]


def emit_policy(
    graph: DirectedPolicy,
    invariants: Sequence[SecurityInvariant] = (),
    priority: Iterable[tuple[str, str]] | None = None,
) -> str:
    """Canonical policy document text. Invariants must come from the library."""
    priority = None if priority is None else [Edge(*e) for e in priority]
    if priority == graph.sorted_edges():
        priority = None
    sections = [
        ("nodes", [_j(n) for n in graph.sorted_nodes()]),
        ("edges", [_j(list(e)) for e in graph.sorted_edges()]),
        ("invariants", [_j(spec_to_dict(m.spec)) for m in invariants]),
    ]
    if priority is not None:
        sections.append(("priority", [_j(list(e)) for e in priority]))
    lines = ["{", f'  "version": {SUPPORTED_VERSION},']
    for i, (key, items) in enumerate(sections):
        lines += _block(key, items, last=i == len(sections) - 1)
    lines.append("}")
    return "\n".join(lines) + "\n"


def emit_stateful(policy: StatefulPolicy) -> str:
    lines = ["{", f'  "version": {SUPPORTED_VERSION},']
    lines += _block("nodes", [_j(n) for n in sorted(policy.nodes)])
    lines += _block("flows", [_j(list(e)) for e in sorted(policy.flows)])
    lines += _block("stateful", [_j(list(e)) for e in sorted(policy.stateful)], last=True)
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dot_id(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def emit_dot(graph: DirectedPolicy, policy: StatefulPolicy) -> str:
    """Flows as solid edges, newly permitted backflows as dashed edges."""
    lines = ["digraph policy {"]
    lines += [f"  {_dot_id(n)};" for n in graph.sorted_nodes()]
    lines += [f"  {_dot_id(s)} -> {_dot_id(r)};" for s, r in sorted(policy.flows)]
    lines += [
        f"  {_dot_id(s)} -> {_dot_id(r)} [style=dashed];" for s, r in sorted(new_backflows(policy))
    ]
    lines.append("}")
    return "\n".join(lines) + "\n"


def emit_iptables(policy: StatefulPolicy) -> str:
    """iptables rules: NEW-state accepts for stateful flows, plain accepts for the rest."""
    lines = [
        f"iptables -A INPUT -s {s} -d {r} -m conntrack --ctstate NEW -j ACCEPT"
        for s, r in sorted(policy.stateful)
    ]
    lines += [
        f"iptables -A INPUT -s {s} -d {r} -j ACCEPT" for s, r in sorted(policy.flows - policy.stateful)
    ]
    if policy.stateful:
        lines.append("iptables -A INPUT -m conntrack --ctstate ESTABLISHED -j ACCEPT")
    lines.append("iptables -A INPUT -j DROP")
    return "\n".join(lines) + "\n"


def report_to_dict(report: ComplianceReport) -> dict[str, Any]:
    return {
        "overall": report.overall,
        "precondition_ok": report.precondition_ok,
        "syntactic_ok": report.syntactic_ok,
        "ifs_ok": report.ifs_ok,
        "acs_efficient_ok": report.acs_efficient_ok,
        "reasons": list(report.reasons),
        "violating_invariants": [
            {
                "invariant": w.invariant,
                "offending": [list(e) for e in sorted(w.offending)],
                "excess": [list(e) for e in sorted(w.excess)],
            }
            for w in report.violating_invariants
        ],
    }


def emit_report(report: ComplianceReport) -> str:
    return json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n"


def render_report_text(report: ComplianceReport) -> str:
    def mark(ok: bool) -> str:
        return "ok" if ok else "FAIL"

    lines = [
        f"policy valid:            {mark(report.precondition_ok)}",
        f"stateful policy syntax:  {mark(report.syntactic_ok)}",
        f"information flow:        {mark(report.ifs_ok)}",
        f"access control (no side effects): {mark(report.acs_efficient_ok)}",
    ]
    for reason in report.reasons:
        lines.append(f"  - {reason}")
    for w in report.violating_invariants:
        excess = ", ".join(str(e) for e in sorted(w.excess))
        lines.append(f"  {w.invariant}: offending edges beyond tolerated backflows: {excess}")
    lines.append("COMPLIANT" if report.overall else "NOT COMPLIANT")
    return "\n".join(lines) + "\n"
