"""Exception hierarchy shared by all engine components.

Every classified failure raised by this package derives from ``FfsnError``,
so callers (and the CLI exit-code mapping) can distinguish engine errors
from genuine bugs.
"""


class FfsnError(Exception):
    """Base class for all classified engine errors."""


class ConfigError(FfsnError):
    """Invalid or inconsistent configuration (sample rate, m, dimensions)."""


class DataError(FfsnError):
    """Malformed payload data: non-finite samples, negative magnitudes."""


class ShapeError(FfsnError):
    """Array dimensions inconsistent with the declared contract."""


class StateError(FfsnError):
    """Operation violates the lifecycle contract (double flush, empty block)."""


class FormatError(FfsnError):
    """Structurally malformed file: bad magic, truncation, CRC mismatch."""


class ValidationError(FfsnError):
    """Structurally sound file with invalid semantics: unknown tensor names,
    shape mismatches against the config block, missing tensors."""


class MetricError(FfsnError):
    """Metric undefined for the given inputs (e.g. zero-energy reference)."""
