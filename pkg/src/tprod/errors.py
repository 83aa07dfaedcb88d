"""Exception types raised by the tprod library."""


class TprodError(Exception):
    """Base class for all library errors."""


class DimMismatch(TprodError):
    """Operand dimensions do not conform."""


class NotBlockCirculant(TprodError):
    """Matrix is not block-circulant to the structural tolerance."""


class Singular(TprodError):
    """A face matrix is numerically singular.

    Carries ``face`` (index of the worst face) and ``smin`` (its smallest
    singular value) when known.
    """

    def __init__(self, msg, face=None, smin=None):
        super().__init__(msg)
        self.face = face
        self.smin = smin


class ZeroSingularValueRequiresFZero(TprodError):
    """A zero singular value sits inside the rank window but f(0) != 0."""


class ZeroSingularValue(TprodError):
    """Operation requires strictly positive singular values."""


class FnDomainError(TprodError):
    """Scalar function undefined or non-finite at a required point."""


class DefectiveFace(TprodError):
    """Face eigendecomposition too ill-conditioned and no series fallback."""


class SeriesDivergence(TprodError):
    """Power series does not converge on the face spectrum."""


class RadiusViolation(TprodError):
    """A singular value lies outside the series' disc of convergence."""


class NoConvergence(TprodError):
    """Iteration hit its term cap with a non-negligible last term."""


class NearSingularShift(TprodError):
    """Resolvent shift too close to a singular value."""


class EmptyValues(TprodError):
    """Contour construction needs at least one enclosed value."""


class EigenvalueOnContour(TprodError):
    """A face eigenvalue lies (numerically) on the integration contour."""


class UnsupportedClass(TprodError):
    """Unknown structured-tensor class name."""


class HypothesisViolation(TprodError):
    """Scalar function fails the hypothesis required by a preservation law."""


class BadPermutation(TprodError):
    """Sequence is not a permutation of 0..n-1."""


class ConsistencyError(TprodError):
    """Two internal evaluation routes disagreed beyond tolerance."""


class FileFormatError(TprodError):
    """Tensor file is malformed or truncated."""
