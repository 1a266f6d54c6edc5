"""Exception types shared across the package."""


class CycleMatchError(Exception):
    """Base class for all package errors."""


class DimensionMismatchError(CycleMatchError):
    """Point clouds with inconsistent ambient dimensions."""


class InvalidSimplexError(CycleMatchError):
    """Vertex set is not a strictly increasing sequence below the point count."""


class InvalidFieldError(CycleMatchError):
    """Coefficient field characteristic is not prime."""


class NotNestedError(CycleMatchError):
    """Sub-filtration metric is not entrywise >= the super-filtration metric."""


class EmptyInputError(CycleMatchError):
    """An operation received an empty point cloud or file."""


class CompatibilityError(CycleMatchError):
    """Inputs were not produced from one union problem with a shared point order."""


class ReindexError(CycleMatchError):
    """A barcode index is not covered by the re-indexing map."""


class OracleScaleError(CycleMatchError):
    """Instance exceeds the size the dense oracle is willing to process."""


class InputFormatError(CycleMatchError):
    """Unparsable input file; carries a location for diagnostics."""

    def __init__(self, message, path=None, line=None, column=None):
        loc = ""
        if path is not None:
            loc += f"{path}:"
        if line is not None:
            loc += f"{line}:"
        if column is not None:
            loc += f"{column}:"
        super().__init__(f"{loc} {message}" if loc else message)
        self.path = path
        self.line = line
        self.column = column


class InternalInvariantError(CycleMatchError):
    """An internal consistency check failed; indicates a bug, not bad input."""
