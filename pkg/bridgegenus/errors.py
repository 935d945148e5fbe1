"""Exception hierarchy for Bridgegenus."""

from __future__ import annotations


class BridgeGenusError(Exception):
    """Base class for all package errors."""


class WordParseError(BridgeGenusError, ValueError):
    """A twist word could not be parsed or is invalid."""

    def __init__(self, message: str, token: str | None = None, position: int | None = None):
        super().__init__(message)
        self.token = token
        self.position = position


class ResourceCapError(BridgeGenusError):
    """A run was refused or cut short by a resource cap."""


class EnumerationCapError(ResourceCapError):
    """Exhaustive enumeration was requested beyond the configured cap."""

    def __init__(self, n: int, cap: int):
        super().__init__(
            f"Refusing to enumerate n={n}: exceeds enumeration cap {cap} "
            f"(set BRIDGEGENUS_ENUMERATION_CAP to raise it)"
        )
        self.n = n
        self.cap = cap


class InvariantViolation(BridgeGenusError):
    """An internal invariant failed (trace replay, quarter lower bound)."""


class TraceFormatError(BridgeGenusError, ValueError):
    """A serialized trace is malformed or its header disagrees with its steps."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line
