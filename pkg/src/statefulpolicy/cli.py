"""Command-line interface.

Exit status: 0 success / compliant, 1 not compliant, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

from .casestudy import generate_policy, run_case_study
from .compliance import verify
from .errors import OracleLimitExceeded, PolicyError
from .formats import (
    emit_dot,
    emit_iptables,
    emit_policy,
    emit_report,
    emit_stateful,
    parse_policy,
    parse_priority,
    parse_stateful,
    render_report_text,
)
from .framework import DEFAULT_ORACLE_LIMIT
from .oracle import run_oracles
from .synthesis import GENERATORS

EXIT_OK = 0
EXIT_NONCOMPLIANT = 1
EXIT_USAGE = 2

log = logging.getLogger("statefulpolicy")


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _load_policy(path: str):
    try:
        return parse_policy(_read(path))
    except PolicyError as exc:
        raise InputError(f"{path}: {exc}") from None


def _load_stateful(path: str):
    try:
        return parse_stateful(_read(path))
    except PolicyError as exc:
        raise InputError(f"{path}: {exc}") from None


def cmd_verify(args) -> int:
    doc = _load_policy(args.policy)
    stateful = _load_stateful(args.stateful)
    report = verify(stateful, doc.graph, doc.invariants)
    text = emit_report(report) if args.format == "json" else render_report_text(report)
    sys.stdout.write(text)
    if args.report:
        _write(args.report, emit_report(report))
    return EXIT_OK if report.overall else EXIT_NONCOMPLIANT


def cmd_synthesize(args) -> int:
    doc = _load_policy(args.policy)
    order = parse_priority(_read(args.order)) if args.order else doc.priority
    generator = GENERATORS[args.algorithm]
    try:
        result = generator(doc.graph, doc.invariants, order)
    except (PolicyError, ValueError) as exc:
        raise InputError(str(exc)) from None
    report = verify(result, doc.graph, doc.invariants)
    if not report.overall:
        raise RuntimeError(
            f"internal error: {args.algorithm} produced a non-compliant policy: {report.reasons}"
        )
    _write(args.output, emit_stateful(result))
    if args.dot:
        _write(args.dot, emit_dot(doc.graph, result))
    if args.iptables:
        _write(args.iptables, emit_iptables(result))
    return EXIT_OK


def cmd_emit(args) -> int:
    doc = _load_policy(args.policy)
    stateful = _load_stateful(args.stateful)
    if not stateful.is_valid():
        raise InputError(f"{args.stateful}: " + "; ".join(stateful.syntax_errors()))
    text = emit_dot(doc.graph, stateful) if args.format == "dot" else emit_iptables(stateful)
    _write(args.output, text)
    return EXIT_OK


def cmd_oracle(args) -> int:
    doc = _load_policy(args.policy)
    stateful = _load_stateful(args.stateful)
    try:
        result = run_oracles(stateful, doc.invariants, limit=args.limit)
    except OracleLimitExceeded as exc:
        raise InputError(str(exc)) from None
    except PolicyError as exc:
        raise InputError(f"{args.stateful}: {exc}") from None
    payload = asdict(result) | {"consistent": result.consistent}
    sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return EXIT_OK if result.consistent else EXIT_NONCOMPLIANT


def cmd_casestudy(args) -> int:
    try:
        graph, invariants = generate_policy(
            args.nodes, args.edges, seed=args.seed, protected=args.invariants
        )
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if args.output:
        _write(args.output, emit_policy(graph, invariants))
    result = run_case_study(graph, invariants)
    sys.stdout.write(json.dumps(asdict(result), indent=2, sort_keys=True) + "\n")
    return EXIT_OK if all(result.verified.values()) else EXIT_NONCOMPLIANT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="statefulpolicy",
        description="Verify and synthesize stateful implementations of directed security policies.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="check a stateful policy against a policy document")
    p.add_argument("policy")
    p.add_argument("stateful")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--report", help="also write the JSON report to this file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("synthesize", help="compute a maximal stateful policy")
    p.add_argument("policy")
    p.add_argument("--algorithm", choices=sorted(GENERATORS), default="generate1")
    p.add_argument("--order", help="JSON list of [src, dst] edges, most preferred first")
    p.add_argument("-o", "--output", help="stateful document path (default: stdout)")
    p.add_argument("--dot", help="write a DOT rendering here")
    p.add_argument("--iptables", help="write iptables rules here")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("emit", help="render a stateful policy as DOT or iptables rules")
    p.add_argument("policy")
    p.add_argument("stateful")
    p.add_argument("--format", choices=("dot", "iptables"), required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_emit)

    p = sub.add_parser("oracle", help="run the exhaustive side-effect checks")
    p.add_argument("policy")
    p.add_argument("stateful")
    p.add_argument("--limit", type=int, default=DEFAULT_ORACLE_LIMIT)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("casestudy", help="time synthesis on a generated policy")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--nodes", "-n", type=int, default=24)
    p.add_argument("--edges", "-k", type=int, default=496)
    p.add_argument("--invariants", type=int, default=3, help="number of protected hosts")
    p.add_argument("-o", "--output", help="write the generated policy document here")
    p.set_defaults(func=cmd_casestudy)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
