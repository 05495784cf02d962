"""
Exception hierarchy shared by the library, the CLI and the HTTP service.
"""


class PlancherelError(Exception):
    """Base class for every error raised by this package."""


class ArgumentError(PlancherelError, ValueError):
    """An operation was called outside its domain (bad size, bad permutation, ...)."""


class ResourceLimitError(PlancherelError):
    """A configured enumeration or verification cap would be exceeded."""

    def __init__(self, what: str, n: int, cap: int):
        self.what = what
        self.n = n
        self.cap = cap
        super().__init__(f"{what}: n={n} exceeds cap {cap}")


class InvariantViolation(PlancherelError, AssertionError):
    """An exact identity or a hard pathwise inequality failed."""

    def __init__(self, invariant: str, detail: str = ""):
        self.invariant = invariant
        self.detail = detail
        message = invariant if not detail else f"{invariant}: {detail}"
        super().__init__(message)


class ConsistencyError(InvariantViolation):
    """A count that must be a non-negative integer was not; signals a character bug."""
