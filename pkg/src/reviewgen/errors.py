"""Exception types shared across the reviewgen pipeline."""


class ReviewgenError(Exception):
    """Base class for all reviewgen errors."""


class ParseError(ReviewgenError):
    """A document could not be parsed (malformed syntax or wrong field types)."""


class ValidationError(ReviewgenError):
    """A parsed document violates a structural invariant."""


class CutoffMismatchError(ReviewgenError):
    """Two background indexes with different cutoff years cannot be merged."""


class OverlappingPapersError(ReviewgenError):
    """Two background indexes share contributing papers and cannot be merged."""


class PreconditionViolation(ReviewgenError):
    """An operation was called with arguments outside its contract."""


class FormatVersionError(ReviewgenError):
    """A persisted file has an unknown format marker or version."""


class ShapeMismatchError(ReviewgenError):
    """Tensor shapes do not line up with the declared model dimensions."""


class EmptySequenceError(ReviewgenError):
    """An operation requiring a non-empty sequence received an empty one."""


class EmptyDatasetError(ReviewgenError):
    """Training or evaluation was requested on an empty dataset."""


class MissingModelError(ReviewgenError):
    """No trained model is available for a requested category."""

    def __init__(self, category_name: str):
        super().__init__(f"no model for category: {category_name}")
        self.category_name = category_name


class UnsupportedRelationError(ReviewgenError):
    """A relation type has no realization phrase."""
