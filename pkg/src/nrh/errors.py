"""Exception types raised by nrh."""


class NRHError(Exception):
    """Base class for all library errors."""


class SpaceMismatch(NRHError):
    """Operands live in different pseudo-Euclidean spaces."""


class GradeError(NRHError):
    """A multivector has the wrong grade for the requested operation."""


class RankError(NRHError):
    """The tensor rank is not supported by the operation."""


class DimensionError(NRHError):
    """An object has the wrong dimension."""


class NotAdapted(NRHError):
    """A subalgebra does not preserve the required isotropic line."""


class NotWeaklyIrreducible(NRHError):
    """A subalgebra of so(1, n+1) matches none of the weakly irreducible types."""


class SignatureError(NRHError):
    """The metric does not have the required signature."""


class ModelInconsistent(NRHError):
    """A supposedly valid model produced a Lie algebra violating Jacobi."""


class FamilyConstraintError(NRHError):
    """Parameters of a family violate one of its defining constraints."""

    def __init__(self, family, failed):
        self.family = family
        self.failed = list(failed)
        names = ", ".join(c.clause for c in self.failed)
        super().__init__(f"{family}: violated {names}")


class HolonomyOverlap(NRHError):
    """The base holonomy and the added abelian algebra intersect.

    The extended model is still built and available as ``model``.
    """

    def __init__(self, message, model=None):
        super().__init__(message)
        self.model = model


class SingularMetric(NRHError):
    """The coordinate metric is degenerate at the sample point."""


class SchemaError(NRHError):
    """A model file does not follow the expected JSON layout."""


class InternalError(NRHError):
    """An internal consistency check failed; indicates a bug."""


class RankUnstable(UserWarning):
    """A numeric rank changes when the singular-value cut moves by one decade."""
