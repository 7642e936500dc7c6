"""Exception hierarchy for the ladder package."""


class LadderError(Exception):
    """Base class for all errors raised by ladder."""


class ZeroToNegativePower(LadderError, ZeroDivisionError):
    pass


class DimensionMismatch(LadderError, ValueError):
    pass


class CompositeModulus(LadderError, ValueError):
    pass


class BadPrime(LadderError, ValueError):
    pass


class BoundaryDegenerate(LadderError):
    pass


class NoEisensteinCongruence(LadderError):
    pass


class MultiplicityFailure(LadderError):
    def __init__(self, message, dimension):
        super().__init__(message)
        self.dimension = dimension


class NotIrregular(LadderError, ValueError):
    pass


class EvenIndex(LadderError, ValueError):
    pass


class UnknownFormat(LadderError, ValueError):
    pass
