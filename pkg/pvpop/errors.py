"""Exception hierarchy and the CLI exit codes they map to."""

from __future__ import annotations

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERIC = 2
EXIT_INVARIANT = 3


class PvpopError(Exception):
    """Base class for every error raised by pvpop."""


class DomainError(PvpopError, ValueError):
    """An argument lies outside the domain of the function it was passed to."""


class DegenerateDataError(DomainError):
    """The data make the requested statistic undefined (e.g. zero spread)."""


class NumericError(PvpopError, ArithmeticError):
    """An iterative kernel failed to converge or produced a non-finite value."""


class ConfigError(PvpopError, ValueError):
    """A scenario, design or CLI configuration is invalid or inconsistent."""


class InvariantViolation(PvpopError):
    """A generated replication record broke a probability invariant."""


class SimulationCancelled(PvpopError):
    """Raised when a batch run is cancelled through its cancel_check hook."""


def exit_code_for(exc: BaseException) -> int:
    """Map an exception to the process exit code the CLI reports."""
    if isinstance(exc, InvariantViolation):
        return EXIT_INVARIANT
    if isinstance(exc, NumericError):
        return EXIT_NUMERIC
    if isinstance(exc, (DomainError, ConfigError)):
        return EXIT_USAGE
    return EXIT_NUMERIC
