"""Exception hierarchy. The CLI maps each class to a process exit code."""


class DCCauseError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigError(DCCauseError, ValueError):
    """Invalid user configuration or arguments."""

    exit_code = 1


class DataError(DCCauseError, ValueError):
    """Input data cannot be processed (empty, degenerate, malformed)."""

    exit_code = 2


class ConsistencyError(DCCauseError, ArithmeticError):
    """An internal numerical invariant was violated."""

    exit_code = 3
