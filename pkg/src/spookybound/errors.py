"""Exception hierarchy shared by all subpackages."""


class SpookyError(Exception):
    """Base class for every error raised by this package."""


class DomainError(SpookyError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PreconditionError(DomainError):
    """An approximation the operation relies on does not hold."""


class UsageError(SpookyError, ValueError):
    """Arguments are individually valid but inconsistent with each other."""


class ConfigError(SpookyError, ValueError):
    """A configuration value is invalid. ``field`` names the offending key."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class ParseError(SpookyError, ValueError):
    """A data file is malformed. ``offset`` is the byte offset of the problem."""

    def __init__(self, path, offset, message):
        super().__init__(f"{path}: byte offset {offset}: {message}")
        self.path = path
        self.offset = offset


class SyncError(SpookyError, RuntimeError):
    """The sync-pulse streams could not be associated or fitted."""
