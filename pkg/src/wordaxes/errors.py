"""Exception hierarchy shared across the toolkit.

Everything raised on bad data or bad configuration derives from
:class:`WordaxesError`, so callers (notably the CLI) can distinguish domain
failures from programming errors.
"""


class WordaxesError(Exception):
    """Base class for all domain errors raised by this package."""


class EmbeddingParseError(WordaxesError):
    """An embedding text file violated its format; message carries the line number."""


class ZeroVectorError(WordaxesError):
    """A zero-norm vector appeared where a direction or unit row is required."""


class DegenerateDataError(WordaxesError):
    """Input data has no usable variation (constant column, all-zero matrix, too few rows)."""


class SchemaError(WordaxesError):
    """A survey or labeling CSV violated its documented schema; message carries the line number."""


class MeasurementError(WordaxesError):
    """A measurement could not be carried out (unresolvable poles, normalization mismatch)."""


class ConfigError(WordaxesError):
    """A run configuration file is invalid; message carries the offending field path."""
