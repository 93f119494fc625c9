"""Exception hierarchy for scalefn."""


class ScalefnError(Exception):
    """Base class for every error raised by this package."""


class MapValidationError(ScalefnError, ValueError):
    """A map description does not define a valid Markov map."""


class OverlapError(MapValidationError):
    pass


class GapError(MapValidationError):
    pass


class AlignmentError(MapValidationError):
    pass


class NonMonotoneError(MapValidationError):
    pass


class NonDiffeo(MapValidationError):
    pass


class OutOfDomain(ScalefnError, ValueError):
    pass


class NotInImage(ScalefnError, ValueError):
    pass


class NotGeometricallyFinite(ScalefnError):
    pass


class CycleThroughCritical(NotGeometricallyFinite):
    pass


class ExponentMismatch(ScalefnError):
    pass


class UnsuitableWord(ScalefnError, ValueError):
    pass


class NotDecaying(ScalefnError):
    pass


class NoConvergence(ScalefnError):
    pass


class NotConverged(ScalefnError):
    """Raised when an estimate did not settle; ``estimate`` holds the partial result."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class HypothesisViolated(ScalefnError):
    pass


class NotGoodMarkov(ScalefnError):
    pass


class FamilyNotConvergent(ScalefnError):
    pass


class CriticalOnOrbit(ScalefnError):
    pass


class ChainUnresolved(ScalefnError):
    pass


class IncompatibleCombinatorics(ScalefnError):
    pass
