"""Exception hierarchy shared by all tilekit modules."""


class TilekitError(Exception):
    """Base class for every error raised by tilekit."""

    exit_code = 2


class MismatchedSampling(TilekitError):
    """Two edges with different sample counts were compared."""


class DegenerateEdge(TilekitError):
    """Edge endpoints coincide where distinct endpoints are required."""


class DegenerateCorner(TilekitError):
    """The incident tangents at a corner are parallel."""


class AmbiguousType(TilekitError):
    """An edge congruence is not unique, so the tile need not be finite edge type."""


class WrongTileType(TilekitError):
    """The operation does not apply to this edge type."""


class CapExceeded(TilekitError):
    """An enumeration hit its cap (or is provably unbounded)."""

    exit_code = 3


class OverlapDetected(TilekitError):
    """Two tile interiors intersect."""

    exit_code = 3


class SeamFailure(TilekitError):
    """Surface normals disagree along a shared edge."""

    exit_code = 3


class AmbiguousPlacement(TilekitError):
    """Propagation met several admissible neighbours and no policy picks one."""

    exit_code = 3


class NotClosed(TilekitError):
    """The tiling still has open edges."""

    exit_code = 3


class InvalidProfile(TilekitError):
    """Revolution profile violates the pole conditions."""


class FoldOver(TilekitError):
    """Lift height makes the surface fold over its base."""


class ParseError(TilekitError):
    """A document could not be parsed."""


class ValidationError(TilekitError):
    """A document parsed but violates a data invariant."""


class IoError(TilekitError):
    """A file could not be read or written."""

    exit_code = 4
