"""Exception hierarchy shared by the library and the command-line surface."""
from __future__ import annotations

from typing import Optional


class QClusterError(ValueError):
    """Base class for every error raised by qcluster."""


class InvalidInstanceError(QClusterError):
    pass


class InvalidScalarError(QClusterError):
    pass


class InvalidPointError(QClusterError):
    pass


class ShapeError(QClusterError):
    pass


class InvalidKError(QClusterError):
    pass


class OracleSizeError(QClusterError):
    pass


class InvalidPairError(QClusterError):
    pass


class InvalidPermutationError(QClusterError):
    pass


class PreconditionError(QClusterError):
    pass


class ModelError(QClusterError):
    pass


class UsageError(QClusterError):
    pass


class InputError(QClusterError):
    """Malformed instance file. Carries the offending line when known."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"{message} at line {line}"
        super().__init__(message)


def require_k(k: int, n: int) -> None:
    if not isinstance(k, int) or isinstance(k, bool) or not 1 <= k <= n:
        raise InvalidKError(f"k must be an integer in [1, {n}], got {k!r}")


def require_size(n: int, limit: int, what: str) -> None:
    if n > limit:
        raise OracleSizeError(f"{what} is exhaustive and limited to n <= {limit}, got n={n}")
