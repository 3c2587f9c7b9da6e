"""Exception types raised across the library.

All inherit from HdclustError so callers can catch library failures with a
single except clause; the benchmark runner relies on this to record a failed
seed without aborting the whole experiment.
"""


class HdclustError(Exception):
    """Base class for all hdclust errors."""


class DimensionMismatch(HdclustError):
    """Hypervectors of different dimensionality were combined."""


class ModeMismatch(HdclustError):
    """Binary and integer hypervectors were combined."""


class EmptyInput(HdclustError):
    """An operation requiring at least one element received none."""


class ZeroVector(HdclustError):
    """Cosine similarity requested for an all-zero vector."""


class TieBreakRequired(HdclustError):
    """A binary majority vote tied and no tie-break bit source was given."""


class InvalidQuantization(HdclustError):
    """Quantization level count q is below 2."""


class NonFiniteFeature(HdclustError):
    """A feature value is NaN or infinite."""


class InsufficientSamples(HdclustError):
    """Fewer samples than clusters requested."""


class DegenerateRange(HdclustError):
    """A value range collapsed to a single point where a spread was needed."""


class LengthMismatch(HdclustError):
    """Paired sequences have different lengths."""


class NoExemplar(HdclustError):
    """Affinity propagation elected no exemplar."""


class ParseError(HdclustError):
    """A dataset file could not be parsed; carries row/column coordinates."""

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class SchemaMismatch(HdclustError):
    """Loaded dataset disagrees with its declared feature/cluster counts."""


class MissingLabel(HdclustError):
    """A row has no label value."""


class ConfigError(HdclustError):
    """An experiment configuration is invalid."""
