"""Exception hierarchy shared across the toolkit."""


class CurvafieldError(Exception):
    """Base class for all toolkit errors."""


class ZeroVector(CurvafieldError):
    pass


class DegenerateSimplex(CurvafieldError):
    pass


class DegenerateCone(CurvafieldError):
    pass


class ParseError(CurvafieldError):
    pass


class InvalidPolygon(CurvafieldError):
    pass


class GoalInObstacle(CurvafieldError):
    pass


class NonConforming(CurvafieldError):
    pass


class TriangulationFailed(CurvafieldError):
    pass


class GoalOutsideComplex(CurvafieldError):
    pass


class NoSuccessor(CurvafieldError):
    pass


class OutsideDomain(CurvafieldError):
    pass


class GoalReached(CurvafieldError):
    """Signal, not a failure: the query point is within the goal radius."""


class StartOutsideDomain(CurvafieldError):
    pass


class StartUnreachable(CurvafieldError):
    pass


class NotConverged(CurvafieldError):
    pass


class InvalidWeights(CurvafieldError):
    pass


class TooShort(CurvafieldError):
    pass


class EmptyTrajectory(CurvafieldError):
    pass


class KeyMismatch(CurvafieldError):
    pass
