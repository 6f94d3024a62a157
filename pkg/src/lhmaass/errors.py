"""Exception types; each maps to a CLI exit code."""


class LhmaassError(Exception):
    exit_code = 1


class DomainError(LhmaassError, ValueError):
    """Invalid input or violated hypothesis."""

    exit_code = 2


class ToleranceError(LhmaassError):
    """A numerical check exceeded its tolerance."""

    exit_code = 3


class DataError(LhmaassError):
    """Missing, malformed or inconsistent data or fixture file."""

    exit_code = 4
