"""Exception types shared across the package."""


class PerigidError(Exception):
    """Base class for every error raised by this package."""


class FrameworkError(PerigidError, ValueError):
    """Invalid framework data (graph, placement, or file contents)."""


class LoopEdgeError(FrameworkError):
    """Edge orbit with equal endpoints and zero shift."""


class DuplicateEdgeOrbitError(FrameworkError):
    """Two edge orbits coincide up to orientation reversal."""


class SingularLatticeError(FrameworkError):
    """Lattice matrix is singular below the degeneracy tolerance."""


class ZeroLengthEdgeError(FrameworkError):
    """An edge orbit realizes to a zero vector."""


class DimensionMismatchError(FrameworkError):
    """Inconsistent dimensions between graph, positions, shifts, or lattice."""


class SchemaError(FrameworkError):
    """Framework file does not match the JSON schema."""


class InvalidDimensionError(FrameworkError):
    """Constructor called with an unsupported dimension or variant index."""


class NotSimplexFamilyError(FrameworkError):
    """Operation requires a framework from the two-orbit simplex family."""


class UnknownOrbitError(PerigidError, KeyError):
    """Referenced vertex orbit does not exist."""


class NumericalError(PerigidError):
    """Base class for numerical failures."""


class NumericalFailureError(NumericalError):
    """Solver exceeded its iteration cap or produced an inconsistent result."""


class IllConditionedError(NumericalError):
    """Singular values cluster at the rank threshold; rank is ambiguous."""


class NewtonDivergenceError(NumericalError):
    """Corrector failed to reduce the residual below tolerance."""


class SingularJacobianError(NumericalError):
    """Rank drop along a continuation path; possible bifurcation."""


class NonPointedConeError(NumericalError):
    """Halfspace cone has a nonzero lineality space; no extremal rays exist."""


class FlexDimensionTooLargeError(NumericalError):
    """Ray enumeration is disabled beyond six flex dimensions."""


class NotAFlexError(NumericalError):
    """Motion vector does not annihilate the edge constraints."""


class StressError(PerigidError):
    """Base class for stress extraction failures."""


class NoStressError(StressError):
    """Stress space is trivial."""


class NonUniqueStressError(StressError):
    """Stress space has dimension greater than one."""


class ZeroPivotError(StressError):
    """Requested normalization edge carries a vanishing coefficient."""
