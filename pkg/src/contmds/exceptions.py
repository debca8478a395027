"""Exception and warning types shared across the package."""


class CmdsError(ValueError):
    """Base class for all validation and solver errors."""


class ShapeMismatch(CmdsError):
    """Array dimensions do not agree with the declared grid/item counts."""


class NonFiniteEntry(CmdsError):
    """A distance or weight entry is NaN or infinite."""


class NegativeDistance(CmdsError):
    """A distance entry is negative."""


class AsymmetryTooLarge(CmdsError):
    """A distance slice deviates from symmetry beyond the repair threshold."""


class NonZeroDiagonal(CmdsError):
    """A distance slice has a diagonal entry beyond the repair threshold."""


class IndexOutOfRange(CmdsError, IndexError):
    """An item or slice index is outside the valid range."""


class GridTooShort(CmdsError):
    """The grid has fewer points than the requested difference order needs."""


class FactorizationFailure(CmdsError):
    """Cholesky factorization of an update system failed (non-PD input)."""


class SingularSystem(CmdsError):
    """A curve update has no unique solution (zero weights and no penalty)."""


class AlphaOutOfRange(CmdsError):
    """A mixture weight or quantile lies outside its admissible interval."""


class EmptyGraph(CmdsError):
    """A subject's adjacency matrix has no positive weights."""


class EigenFailure(CmdsError):
    """Eigendecomposition in classical scaling did not converge."""


class ZeroDistanceWithReciprocalWeight(CmdsError):
    """Reciprocal weighting requested on a zero off-diagonal distance."""


class SingleSliceInput(CmdsError):
    """An operation needing at least two slices received a single slice."""


class InvalidSettings(CmdsError):
    """Solver settings violate their declared bounds."""


class ParseError(CmdsError):
    """A file could not be parsed against the expected schema."""


class SchemaVersionMismatch(ParseError):
    """File schema version or internal consistency counts do not match."""


class DuplicatePointsWarning(UserWarning):
    """Input points contain exact duplicates; merges remain well defined."""


class DescentViolationWarning(RuntimeWarning):
    """Recorded cost increased beyond numerical slack during a solve."""
