"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: input errors exit 2, config errors 3,
invariant violations 4.
"""


class SeqSubError(Exception):
    """Base class for every error raised by this package."""


class InputError(SeqSubError, ValueError):
    """Malformed or inconsistent input data."""


class UnknownEdgeError(InputError, KeyError):
    def __init__(self, edge_id):
        super().__init__(f"unknown edge id {edge_id!r}")
        self.edge_id = edge_id

    def __str__(self):
        return self.args[0]


class LogFormatError(InputError):
    """A row of an interaction log could not be parsed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ConfigError(SeqSubError, ValueError):
    """Invalid or infeasible configuration."""


class OracleSizeError(ConfigError):
    def __init__(self, count, cap):
        super().__init__(
            f"brute force would examine {count} sequences, above the cap of {cap}"
        )
        self.count = count
        self.cap = cap


class UndefinedMetricError(SeqSubError, ValueError):
    """A metric has a zero denominator for the given input."""


class InvariantError(SeqSubError, AssertionError):
    """An internal invariant was violated; indicates a bug."""
