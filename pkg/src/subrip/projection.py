"""Gaussian random projection of subspaces, and the column-normalized
("quasi-orthonormal") basis that approximates Gram-Schmidt."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .core import RANK_RTOL, Subspace, _check_rank, affinity, gram_schmidt
from .errors import AmbientMismatch, DimensionOrder, DomainError, RankCollapse, RankDeficient
from .rng import gaussian

COLLAPSE_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class GaussianProjector:
    """An ``n x N`` matrix with i.i.d. N(0, 1/n) entries, and its seed.

    Build with :func:`make_projector`; the matrix is a pure function of
    ``(n, N, seed)``.
    """

    n: int
    N: int
    seed: int
    matrix: np.ndarray

    def __repr__(self):
        return f"GaussianProjector(n={self.n}, N={self.N}, seed={self.seed})"


def make_projector(n: int, N: int, seed: int) -> GaussianProjector:
    n, N = int(n), int(N)
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    if n >= N:
        raise DimensionOrder(f"target dimension n={n} must be smaller than N={N}")
    m = gaussian(seed, (n, N), scale=1.0 / np.sqrt(n))
    m.setflags(write=False)
    return GaussianProjector(n, N, int(seed), m)


def _projected_columns(P: GaussianProjector, X: Subspace) -> np.ndarray:
    if X.ambient_dim != P.N:
        raise AmbientMismatch(f"subspace lives in R^{X.ambient_dim}, projector expects R^{P.N}")
    if X.dim >= P.n:
        raise RankCollapse(f"dim {X.dim} is not below the target dimension n={P.n}")
    return P.matrix @ X.basis


def _orthonormal_image(A: np.ndarray) -> Subspace:
    Q, R = gram_schmidt(A)
    _check_rank(np.linalg.svd(R, compute_uv=False), COLLAPSE_RTOL, RankCollapse, "projected basis")
    return Subspace(Q)


def project(P: GaussianProjector, X: Subspace) -> Subspace:
    """Image ``{Phi x : x in X}`` as a subspace of R^n (same dimension)."""
    return _orthonormal_image(_projected_columns(P, X))


def project_many(P: GaussianProjector, subspaces) -> list[Subspace]:
    """Project several subspaces with one matrix product."""
    subspaces = list(subspaces)
    if not subspaces:
        return []
    for X in subspaces:
        if X.ambient_dim != P.N:
            raise AmbientMismatch(f"subspace lives in R^{X.ambient_dim}, projector expects R^{P.N}")
        if X.dim >= P.n:
            raise RankCollapse(f"dim {X.dim} is not below the target dimension n={P.n}")
    stacked = P.matrix @ np.hstack([X.basis for X in subspaces])
    out, k = [], 0
    for X in subspaces:
        out.append(_orthonormal_image(stacked[:, k:k + X.dim]))
        k += X.dim
    return out


def normalize_columns(A) -> np.ndarray:
    A = np.array(A, dtype=float)
    norms = np.linalg.norm(A, axis=0)
    if np.any(norms == 0.0):
        raise RankCollapse("a projected column vanished")
    return A / norms


def normalized_columns(P: GaussianProjector, X: Subspace) -> np.ndarray:
    """``Phi U`` with each column scaled to unit norm (not orthogonalized)."""
    A = _projected_columns(P, X)
    _, R = gram_schmidt(A)
    _check_rank(np.linalg.svd(R, compute_uv=False), COLLAPSE_RTOL, RankCollapse, "projected basis")
    return normalize_columns(A)


@dataclass(frozen=True, eq=False)
class QuasiOrthoReport:
    """How far a column-normalized matrix is from its Gram-Schmidt basis.

    Attributes
    ----------
    R_bar : (d, d) array
        ``A_bar^T A_bar - I`` with the diagonal set to exactly zero.
    U_bar : (d, d) upper-triangular array
        Solves ``V - A_bar = A_bar @ U_bar``.
    A_bar : (n, d) array
        The column-normalized input.
    V : (n, d) array
        Gram-Schmidt orthonormalization of ``A_bar`` in column order.
    r_norm : float
        Frobenius norm of ``R_bar``.
    max_diag : float
        ``max_i |U_bar[i, i]|``.
    max_offdiag_residual : float
        ``max_{j<i} |U_bar[j, i] + R_bar[j, i]|`` (0 when d = 1).
    """

    R_bar: np.ndarray
    U_bar: np.ndarray
    A_bar: np.ndarray
    V: np.ndarray
    r_norm: float
    max_diag: float
    max_offdiag_residual: float

    @property
    def diag_ratio(self) -> float:
        """``max_diag / r_norm^2``; the lemma's limit is at most 1/4."""
        return self.max_diag / self.r_norm ** 2 if self.r_norm > 0 else 0.0

    @property
    def offdiag_ratio(self) -> float:
        """``max_offdiag_residual / r_norm``; tends to 0 with ``r_norm``."""
        return self.max_offdiag_residual / self.r_norm if self.r_norm > 0 else 0.0

    @property
    def reconstruction_error(self) -> float:
        """Frobenius norm of ``A_bar (I + U_bar) - V``."""
        d = self.U_bar.shape[0]
        return float(np.linalg.norm(self.A_bar @ (np.eye(d) + self.U_bar) - self.V))


def quasi_ortho_report(A_bar) -> QuasiOrthoReport:
    """Gram-Schmidt ``A_bar`` and measure the triangular correction ``U_bar``.

    ``U_bar`` is obtained from the QR factor: with ``A_bar = V R``,
    ``V = A_bar R^{-1}`` so ``U_bar = R^{-1} - I``, which is the unique
    least-squares solution of ``A_bar U = V - A_bar`` for full-rank input and
    is upper triangular by construction.
    """
    A_bar = np.asarray(A_bar, dtype=float)
    if A_bar.ndim == 1:
        A_bar = A_bar.reshape(-1, 1)
    d = A_bar.shape[1]
    norms = np.linalg.norm(A_bar, axis=0)
    if np.max(np.abs(norms - 1.0)) > 1e-8:
        raise DomainError("columns of A_bar must have unit norm")
    if d > A_bar.shape[0]:
        raise RankDeficient(f"{d} columns cannot be independent in R^{A_bar.shape[0]}")
    _check_rank(np.linalg.svd(A_bar, compute_uv=False), RANK_RTOL, RankDeficient, "A_bar")

    V, R = gram_schmidt(A_bar)
    U_bar = np.triu(solve_triangular(R, np.eye(d), lower=False)) - np.eye(d)

    R_bar = A_bar.T @ A_bar - np.eye(d)
    np.fill_diagonal(R_bar, 0.0)
    R_bar = (R_bar + R_bar.T) / 2.0

    iu = np.triu_indices(d, k=1)
    resid = np.abs(U_bar[iu] + R_bar[iu])
    return QuasiOrthoReport(
        R_bar=R_bar,
        U_bar=U_bar,
        A_bar=A_bar,
        V=V,
        r_norm=float(np.linalg.norm(R_bar)),
        max_diag=float(np.max(np.abs(np.diag(U_bar)))),
        max_offdiag_residual=float(resid.max()) if resid.size else 0.0,
    )


def column_normalized_with_gram(gram, n: int, seed: int) -> np.ndarray:
    """An ``n x d`` matrix whose Gram matrix is exactly ``gram`` (up to rounding).

    ``gram`` must be symmetric positive definite with unit diagonal; the
    result is ``Q L^T`` for a random orthonormal ``Q`` and the Cholesky factor
    ``L`` of ``gram``.
    """
    gram = np.asarray(gram, dtype=float)
    d = gram.shape[0]
    if n < d:
        raise DomainError(f"need n >= d, got n={n}, d={d}")
    if np.max(np.abs(np.diag(gram) - 1.0)) > 1e-12:
        raise DomainError("gram must have unit diagonal")
    try:
        L = np.linalg.cholesky(gram)
    except np.linalg.LinAlgError as exc:
        raise RankDeficient("gram is not positive definite") from exc
    Q, _ = gram_schmidt(gaussian(seed, (n, d)))
    return Q @ L.T


def affinity_via_quasi_basis(P: GaussianProjector, X1: Subspace, X2: Subspace) -> float:
    """Projected-affinity estimate ``||A1_bar^T V2||_F``.

    ``A1_bar`` is the column-normalized image of the smaller subspace ``X1``;
    ``V2`` is an orthonormal basis of the image of ``X2``.
    """
    if X1.dim > X2.dim:
        raise DomainError("X1 must be the lower-dimensional subspace")
    A1 = normalized_columns(P, X1)
    V2 = project(P, X2).basis
    return float(np.linalg.norm(A1.T @ V2))


@dataclass(frozen=True)
class QuasiAffinityCheck:
    quasi: float
    exact: float
    eps_emp: float
    d1: int

    @property
    def gap(self) -> float:
        return abs(self.quasi ** 2 - self.exact ** 2)

    @property
    def allowance(self) -> float:
        return self.d1 * self.quasi ** 2 * self.eps_emp

    @property
    def within_bound(self) -> bool:
        return self.gap <= self.allowance + 1e-12


def quasi_affinity_check(P: GaussianProjector, X1: Subspace, X2: Subspace) -> QuasiAffinityCheck:
    """Compare the quasi-basis estimate with the exact projected affinity.

    ``eps_emp`` is the largest off-diagonal entry (in absolute value) of the
    Gram matrix of ``A1_bar``; the soft bound is
    ``|quasi^2 - exact^2| <= d1 * quasi^2 * eps_emp``.
    """
    A1 = normalized_columns(P, X1)
    d1 = A1.shape[1]
    G = A1.T @ A1
    off = np.abs(G - np.diag(np.diag(G)))
    quasi = affinity_via_quasi_basis(P, X1, X2)
    exact = affinity(project(P, X1), project(P, X2))
    return QuasiAffinityCheck(quasi, exact, float(off.max()) if d1 > 1 else 0.0, d1)


__all__ = [
    "GaussianProjector",
    "QuasiAffinityCheck",
    "QuasiOrthoReport",
    "affinity_via_quasi_basis",
    "column_normalized_with_gram",
    "make_projector",
    "normalize_columns",
    "normalized_columns",
    "project",
    "project_many",
    "quasi_affinity_check",
    "quasi_ortho_report",
]
