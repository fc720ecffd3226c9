"""Exception hierarchy; each class maps to a CLI exit status."""


class TriageError(Exception):
    exit_code = 3


class ConfigError(TriageError):
    """Bad configuration, arguments or missing inputs."""

    exit_code = 1


class DataError(TriageError):
    """Input data that cannot be used (unreadable file, missing columns, ...)."""

    exit_code = 2


class InvariantError(TriageError):
    exit_code = 3
