"""Exception types shared across the package."""


class MorseError(ValueError):
    """A critical point is degenerate (second derivative vanishes)."""


class CriticalPointError(ValueError):
    """Critical points could not be resolved on the requested grid."""


class NumericalError(RuntimeError):
    """A root finder or quadrature failed to reach its tolerance."""


class ThinningError(NumericalError):
    """A thinning acceptance ratio exceeded one: the rate bound is not a bound."""
