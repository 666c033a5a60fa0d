"""Exception types shared across the package."""

from __future__ import annotations


class BiaslensError(Exception):
    """Base class for all errors raised by this package."""

    category = "input"


class ParseError(BiaslensError):
    """A source file is malformed. Carries the 1-based line number when known."""

    category = "input"

    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        prefix = ""
        if source is not None:
            prefix += f"{source}: "
        if line is not None:
            prefix += f"line {line}: "
        super().__init__(prefix + message)


class ValidationError(BiaslensError):
    """An in-memory object violates one of its invariants."""

    category = "input"


class DegenerateRateError(BiaslensError):
    """An error rate is undefined (zero denominator) where a value is required."""

    category = "input"


class InconsistentEvidenceError(BiaslensError):
    """Observed evidence has probability zero under the network."""

    category = "evidence"
