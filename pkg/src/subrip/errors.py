"""Exception hierarchy.

Every error raised on a violated precondition derives from
:class:`SubspaceError`, which is itself a ``ValueError``.
"""


class SubspaceError(ValueError):
    pass


class DomainError(SubspaceError):
    """An argument is outside the domain of the formula or constructor."""


class RankDeficient(SubspaceError):
    """Columns are numerically linearly dependent."""


class RankCollapse(SubspaceError):
    """A projected basis lost rank (probability-zero event, or d >= n)."""


class AmbientMismatch(SubspaceError):
    pass


class DimensionOrder(SubspaceError):
    """The projector target dimension is not smaller than the source."""


class MissingCosines(SubspaceError):
    pass


class Infeasible(SubspaceError):
    """A requested geometry cannot be realised in the ambient space."""


class SpectrumInfeasible(Infeasible):
    pass
