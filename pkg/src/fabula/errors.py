"""Shared exception types."""

from __future__ import annotations


class FabulaError(Exception):
    """Base class for engine errors."""


class UnknownNodeError(FabulaError, KeyError):
    """A referenced node/variable id does not resolve."""


class InvalidWorldError(FabulaError, ValueError):
    """A world failed validation where a valid one is required."""


class VersionGraphError(FabulaError, ValueError):
    """A version-tree rule (single root, acyclicity, promote/delete) was violated."""


class QueryError(FabulaError, ValueError):
    """A query is malformed: unknown variable, bad anchor, unsupported mode."""
