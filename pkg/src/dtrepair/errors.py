"""Exception types shared across the package."""


class DtRepairError(Exception):
    """Base class for all library errors."""


class DuplicatePoint(DtRepairError):
    """Two points with the same id (or the same exact coordinates) where
    distinct points are required."""


class DuplicateEdge(DtRepairError):
    """The same undirected edge appears twice in an edge list."""


class NotPlanar(DtRepairError):
    """An edge set contains a proper crossing and cannot be embedded as given."""


class NotFlippable(DtRepairError):
    """Edge flip requested on a hull edge or a non-convex quadrilateral."""


class TooFewPoints(DtRepairError):
    """An operation needs at least 3 points."""


class VertexMismatch(DtRepairError):
    """Two structures that must share a vertex set do not."""


class IdCollision(DtRepairError):
    """Vertex id sets that must be disjoint overlap."""


class InputFormatError(DtRepairError):
    """A points/edges file failed to parse.  Carries the 1-based line number."""

    def __init__(self, path, lineno, message):
        super().__init__(f"{path}:{lineno}: {message}")
        self.path = path
        self.lineno = lineno
