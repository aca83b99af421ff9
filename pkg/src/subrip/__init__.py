"""Subspace geometry under Gaussian random projection."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    PrincipalAngleSpectrum,
    Subspace,
    affinity,
    distance,
    distance_sq_from_affinity,
    gram_schmidt,
    orthonormalize,
    principal_angles,
    same_span,
)
from .errors import (  # noqa: E402
    AmbientMismatch,
    DimensionOrder,
    DomainError,
    Infeasible,
    MissingCosines,
    RankCollapse,
    RankDeficient,
    SpectrumInfeasible,
    SubspaceError,
)
from .generator import PairSpec, make_pair, make_set, random_orthonormal  # noqa: E402
from .projection import GaussianProjector, make_projector, project, project_many  # noqa: E402

__all__ = [
    "AmbientMismatch",
    "DimensionOrder",
    "DomainError",
    "GaussianProjector",
    "Infeasible",
    "MissingCosines",
    "PairSpec",
    "PrincipalAngleSpectrum",
    "RankCollapse",
    "RankDeficient",
    "SpectrumInfeasible",
    "Subspace",
    "SubspaceError",
    "affinity",
    "distance",
    "distance_sq_from_affinity",
    "gram_schmidt",
    "make_pair",
    "make_projector",
    "make_set",
    "orthonormalize",
    "principal_angles",
    "project",
    "project_many",
    "random_orthonormal",
    "same_span",
]
