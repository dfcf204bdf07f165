"""Exception hierarchy shared across the pipeline.

Every stage maps these onto process exit codes / HTTP statuses:
usage problems -> 1 / 400, data problems -> 2 / 422, anything else -> 3 / 500.
"""


class FloodlensError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(FloodlensError):
    """The caller asked for something malformed (bad flags, bad config keys)."""


class DataError(FloodlensError):
    """An input file or record violates its contract.

    The message always names the offending file, record, line or week so the
    caller can fix the input without reading source code.
    """
