"""Exception hierarchy shared by all cleanflex modules."""


class CleanFlexError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(CleanFlexError, ValueError):
    pass


class IllConditioned(CleanFlexError):
    """Confluent interpolation system too close to singular."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class ZeroPolynomial(CleanFlexError, ValueError):
    pass


class DerivativeUnavailable(CleanFlexError):
    pass


class NotOneSided(CleanFlexError):
    pass


class DenominatorVanishesElsewhere(CleanFlexError):
    pass


class FunctionInSpace(CleanFlexError):
    """The analysed function lies in the Chebyshev space (no isolated flexes)."""


class NotSupporting(CleanFlexError):
    pass


class EmptyCensus(CleanFlexError):
    pass


class InfiniteCount(CleanFlexError):
    pass


class NotConvex(CleanFlexError):
    pass


class CircleDegenerate(CleanFlexError):
    pass


class RankDeficient(CleanFlexError):
    pass


class ConicDegenerate(CleanFlexError):
    pass


class TangentLinesParallel(CleanFlexError):
    pass


class ParseError(CleanFlexError, ValueError):
    pass
