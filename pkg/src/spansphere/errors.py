"""Exception hierarchy shared by all modules."""


class SpanSphereError(Exception):
    """Base class for every error raised by the package."""


class InvalidComplex(SpanSphereError, ValueError):
    pass


class ConeVertexClash(SpanSphereError, ValueError):
    pass


class UnsupportedDimension(SpanSphereError, ValueError):
    pass


class WrongModel(SpanSphereError, ValueError):
    pass


class TooFewVertices(SpanSphereError, ValueError):
    pass


class TooSmall(SpanSphereError, ValueError):
    pass


class TooLarge(SpanSphereError, ValueError):
    pass


class InvalidCycle(SpanSphereError, ValueError):
    pass


class TooLargeForExact(SpanSphereError, ValueError):
    pass


class InvalidFacetCount(SpanSphereError, ValueError):
    pass


class SamplingFailed(SpanSphereError, RuntimeError):
    pass


class NotAnEdge(SpanSphereError, ValueError):
    pass


class NoSeparatorFound(SpanSphereError, RuntimeError):
    pass


class WitnessNotSphere(SpanSphereError, ValueError):
    pass


class HNotSubcomplex(SpanSphereError, ValueError):
    pass


class EmptyPatch(SpanSphereError, ValueError):
    pass


class PatchFailed(SpanSphereError, RuntimeError):
    pass


# LC moves
class LcMoveError(SpanSphereError, ValueError):
    pass


class RidgeNotOnBoundary(LcMoveError):
    pass


class RidgesNotAdjacent(LcMoveError):
    pass


class WouldDegenerate(LcMoveError):
    pass


class InvalidGrid(SpanSphereError, ValueError):
    pass
