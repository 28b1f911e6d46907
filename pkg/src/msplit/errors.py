"""Exception types raised across the package."""


class MsplitError(Exception):
    """Base class for all package errors."""


class DimensionError(MsplitError, ValueError):
    """Shapes, factor indices or factor dimensions do not fit together."""


class DimensionGuardError(DimensionError):
    """The total Hilbert-space dimension exceeds the configured guard."""


class NotHermitianError(MsplitError, ValueError):
    pass


class NotDensityError(MsplitError, ValueError):
    """Input is not a positive semidefinite, unit-trace matrix."""


class SingularLogError(MsplitError, ValueError):
    pass


class NotCyclicSeparatingError(MsplitError, ValueError):
    """The reference vector does not have full Schmidt rank across the cut."""


class SupportError(MsplitError, ValueError):
    """Support of the first argument is not contained in that of the second."""


class AlgebraError(MsplitError, RuntimeError):
    """Numerical failure while building or decomposing a *-algebra."""


class FrameError(MsplitError, ValueError):
    """An LP frame does not span the Hermitian operators."""


class LPError(MsplitError, RuntimeError):
    pass


class ScenarioError(MsplitError, ValueError):
    """A scenario file fails to parse or validate."""
