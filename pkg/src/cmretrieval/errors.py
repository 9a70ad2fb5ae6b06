"""Exception types shared across the package."""


class CMRetrievalError(Exception):
    """Base class for all errors raised by this package."""


class LengthMismatch(CMRetrievalError):
    """Run lengths do not sum to the expected raster size."""


class InvalidRecipe(CMRetrievalError):
    """Synthetic scene recipe places regions outside image bounds."""


class GapTooLarge(CMRetrievalError):
    """Segment contains more consecutive missing frames than allowed."""


class EmptyVocabulary(CMRetrievalError):
    """Motion vocabulary has no entries."""


class NoGroundClass(CMRetrievalError):
    """Neither mask yields a ground class under the person."""


class EmptyInput(CMRetrievalError):
    """Composer called with no motions or no contexts."""


class EmptyText(CMRetrievalError):
    """Text encoder called with an empty or whitespace-only string."""


class ShapeMismatch(CMRetrievalError):
    """Array input has the wrong shape."""


class DimMismatch(CMRetrievalError):
    """Embedding dimensionality does not match the expected dimension."""


class ZeroVector(CMRetrievalError):
    """Operation requires a non-zero vector."""


class NonFiniteLoss(CMRetrievalError):
    """Training produced a NaN or infinite loss."""


class DuplicateId(CMRetrievalError):
    """Record id already present in the index."""


class NormalizationFailure(CMRetrievalError):
    """Vector cannot be normalized (zero or non-finite norm)."""


class EmptyIndex(CMRetrievalError):
    """Query against an index with no records."""


class CorruptFile(CMRetrievalError):
    """Persisted file is truncated or fails its checksum."""


class VersionMismatch(CMRetrievalError):
    """Persisted file was written by an incompatible format version."""


class OutOfBounds(CMRetrievalError):
    """Box or region lies outside the frame."""


class MissingLabel(CMRetrievalError):
    """A sample's ground-truth label is not in the candidate set."""


class ManifestError(CMRetrievalError):
    """Manifest line fails schema or invariant validation."""
