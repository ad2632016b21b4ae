"""Exception hierarchy shared by the library and the command line."""


class CbcChaosError(Exception):
    """Base class for every error raised by the analysis core."""

    exit_code = 1


class ConfigError(CbcChaosError, ValueError):
    """Invalid input: block values, labels, cipher specs, bit strings, padding."""

    exit_code = 2


class ResourceLimitError(CbcChaosError):
    """Block size exceeds the ceiling of the requested operation."""

    exit_code = 3


class NotStronglyConnectedError(CbcChaosError):
    """A construction needed a strongly connected transition graph."""

    exit_code = 4

    def __init__(self, message: str, verdict=None):
        super().__init__(message)
        self.verdict = verdict
