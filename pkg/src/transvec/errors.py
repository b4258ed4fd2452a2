"""Exception hierarchy shared by every module.

Each class carries the CLI exit code it maps to, so the front end never has
to guess.
"""

from __future__ import annotations


class TransvecError(Exception):
    exit_code = 1


class InvalidArgumentError(TransvecError, ValueError):
    exit_code = 2


class ParseError(InvalidArgumentError):
    """Malformed text input. ``line``/``position`` are 1-based when known."""

    def __init__(self, message: str, *, line: int | None = None, position: int | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if position is not None:
            where.append(f"position {position}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.line = line
        self.position = position


class ValidationError(TransvecError):
    exit_code = 3

    def __init__(self, message: str, violations: list | None = None):
        super().__init__(message)
        self.violations = list(violations or [])


class CapacityError(TransvecError):
    exit_code = 4


class UnsupportedCircuitError(TransvecError):
    exit_code = 2


class InternalInvariantError(TransvecError, AssertionError):
    exit_code = 5
