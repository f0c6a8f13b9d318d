"""Exception types shared across the package."""


class OnionRankError(Exception):
    """Base class for all errors raised by this package."""


class CorpusError(OnionRankError):
    """A corpus directory or sidecar file is missing or malformed."""


class DataFormatError(OnionRankError):
    """An input file does not match its documented format."""


class ConfigError(OnionRankError):
    """Invalid configuration value or combination."""


class TrainingError(OnionRankError):
    """Training aborted, e.g. on a non-finite loss."""
