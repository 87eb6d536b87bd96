"""Exception hierarchy."""

from __future__ import annotations


class PolicyError(ValueError):
    """Base class for every error raised by this package."""


class InvalidPolicyError(PolicyError):
    """A graph or stateful policy is malformed, or a policy violates its own invariants."""


class UnknownNodeError(PolicyError):
    def __init__(self, node: object, context: str = ""):
        self.node = node
        message = f"unknown node {node!r}"
        if context:
            message += f" in {context}"
        super().__init__(message)


class OracleLimitExceeded(PolicyError):
    """The exponential oracle was asked to enumerate too many subsets."""

    def __init__(self, size: int, limit: int):
        self.size = size
        self.limit = limit
        super().__init__(f"oracle limit exceeded: {size} edges > limit {limit}")


class PolicyFormatError(PolicyError):
    """A policy or stateful document could not be parsed."""

    def __init__(self, message: str, path: str = "", line: int | None = None):
        self.path = path
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if path:
            where.append(path)
        super().__init__(f"{': '.join(where)}: {message}" if where else message)
