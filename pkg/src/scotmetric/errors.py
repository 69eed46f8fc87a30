"""Exception hierarchy shared across the package."""


class ScotError(Exception):
    """Base class for every error raised by scotmetric."""


class GeometryError(ScotError):
    pass


class DegenerateGeometry(GeometryError):
    """Fewer than three distinct vertices, or zero enclosed area."""


class SelfIntersection(GeometryError):
    pass


class MisalignedSeries(ScotError):
    """A proposal frame has no ground-truth frame with the same label."""


class ZeroGroundTruth(ScotError):
    pass


class EmptyDataset(ScotError):
    pass


class DuplicateId(ScotError):
    pass


class InfeasiblePacking(ScotError):
    pass


class TooLarge(ScotError):
    pass


class LoadError(ScotError):
    """Base for problems reading footprint files."""


class EmptyDirectory(LoadError):
    pass


class MissingId(LoadError):
    pass


class InvalidGeometry(LoadError):
    pass


class DuplicateLabel(LoadError):
    pass


class IoFailure(ScotError):
    pass
