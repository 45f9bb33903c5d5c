"""Exception types raised across qmclab."""


class QmclabError(Exception):
    """Base class for all library errors."""


class EmptyGraph(QmclabError):
    pass


class AllLoops(QmclabError):
    pass


class GraphFormatError(QmclabError):
    pass


class DimensionTooLarge(QmclabError):
    pass


class LabelTooLarge(QmclabError):
    pass


class DegenerateNet(QmclabError):
    """A Voronoi cell of the sphere net received no samples."""


class MissingVertex(QmclabError):
    pass


class SlowConvergence(QmclabError):
    """Series evaluation hit its term cap before converging."""


class DomainError(QmclabError):
    pass


class QuadratureNonConvergent(QmclabError):
    pass


class TooManyQubits(QmclabError):
    pass


class NoConvergence(QmclabError):
    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations
