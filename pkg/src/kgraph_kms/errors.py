"""Exception hierarchy.

Errors fall into three families that the command line maps to exit codes:
``ValidationError`` (bad graph input, exit 1), ``PreconditionError`` (valid
input outside the regime an operation supports, exit 2) and
``InvariantBreach`` (a result that should be impossible, exit 3).
"""


class KGraphError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(KGraphError):
    """Raised when a graph description is not a valid finite k-graph.

    ``location`` points at the offending part of the description, e.g.
    ``"squares[3]"``, when one can be identified.
    """

    def __init__(self, msg, location=None):
        super().__init__(msg)
        self.location = location

    def __str__(self):
        msg = super().__str__()
        if self.location:
            return f"{self.location}: {msg}"
        return msg


class MalformedSpec(ValidationError):
    """The description is structurally broken (missing keys, bad ids or types)."""


class MissingSquare(ValidationError):
    """A composable bicoloured pair of edges has no factorisation square."""


class DuplicateSquare(ValidationError):
    """A bicoloured pair of edges appears in more than one square."""


class SourceViolation(ValidationError):
    """Some vertex receives no edge of some colour."""


class CubeInconsistency(ValidationError):
    """Two reorderings of a tricoloured path give different normal forms."""


class PathError(KGraphError, ValueError):
    """Base class for invalid path manipulations."""


class NotComposable(PathError):
    """Source of the left path differs from the range of the right one."""


class BadRange(PathError):
    """Degrees passed to a segment call are not ordered ``0 <= m <= n <= d(p)``."""


class PreconditionError(KGraphError):
    """Valid input that falls outside the supported regime."""


class NotIrreducible(PreconditionError):
    """A vertex matrix is reducible."""


class NotCoordinatewiseIrreducible(PreconditionError):
    """Some vertex matrices of the graph are reducible.

    ``colors`` lists the offending colours (1-based).
    """

    def __init__(self, msg, colors=()):
        super().__init__(msg)
        self.colors = tuple(colors)


class SpectralPreconditionViolated(PreconditionError):
    """``beta * r_i <= ln rho(A_i)`` for the listed colours."""

    def __init__(self, msg, colors=()):
        super().__init__(msg)
        self.colors = tuple(colors)


class InvalidDynamics(PreconditionError):
    """The dynamics vector ``r`` has a non-positive or non-finite entry."""


class NotNormalized(PreconditionError):
    """``eps . y`` differs from 1."""


class NegativeEps(PreconditionError):
    """``eps`` has a negative entry."""


class NotAProbability(PreconditionError):
    """A vector that must be a probability measure on the vertices is not one."""


class InteriorEmpty(PreconditionError):
    """The truncation cutoff leaves no room for the requested degree bound."""


class TooLarge(PreconditionError):
    """The truncated path space would exceed the configured size cap."""


class InvariantBreach(KGraphError):
    """A property guaranteed by theory failed numerically or combinatorially."""
