"""Exception hierarchy shared by all conelike modules."""


class ConelikeError(Exception):
    """Base class for every error raised by this package."""


class OutOfDomain(ConelikeError, ValueError):
    """(s, t) is not in the open quarter disc s, t > 0, s^2 + t^2 < 1."""


class Inconsistent(ConelikeError):
    """Circle-position predicates do not single out one region."""


class Degenerate(ConelikeError):
    """Construction collapses for (s, t) on the flat-cone curve F."""


class DegenerateDomain(Degenerate):
    pass


class NearDegenerate(ConelikeError):
    """A boundary edge is shorter than the sliver guard."""


class NotAnIntersection(ConelikeError, ValueError):
    pass


class OutOfRange(ConelikeError, ValueError):
    pass


class WrongRegion(ConelikeError, ValueError):
    pass


class OutOfD(ConelikeError, ValueError):
    """(l, m) outside the admissible pentagon length domain."""


class NotOnF(ConelikeError, ValueError):
    pass


class SolverDiverged(ConelikeError):
    pass


class DegenerateSides(ConelikeError, ValueError):
    pass


class QuadratureFail(ConelikeError):
    pass


class NoConvergence(ConelikeError):
    def __init__(self, message, residual=None, x=None):
        super().__init__(message)
        self.residual = residual
        self.x = x


class PathEscapesDomain(ConelikeError):
    pass


class ToleranceMiss(ConelikeError):
    pass


class ClosureFailure(ConelikeError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NoSharedEdge(ConelikeError, ValueError):
    pass
