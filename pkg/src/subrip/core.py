"""Exact subspace geometry: orthonormal bases, principal angles, affinity and
the projection F-norm distance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AmbientMismatch, DomainError, RankDeficient

ORTHO_TOL = 1e-10
RANK_RTOL = 1e-8


@dataclass(frozen=True, eq=False)
class Subspace:
    """A linear subspace stored through an orthonormal basis.

    Parameters
    ----------
    basis : (ambient_dim, dim) array
        Columns must be orthonormal to within ``ORTHO_TOL`` entrywise.
        Use :func:`orthonormalize` to build a subspace from arbitrary
        spanning columns.
    """

    basis: np.ndarray

    def __post_init__(self):
        b = np.array(self.basis, dtype=float, copy=True)
        if b.ndim == 1:
            b = b.reshape(-1, 1)
        if b.ndim != 2 or b.shape[1] < 1 or b.shape[1] > b.shape[0]:
            raise DomainError(f"basis must be N x d with 1 <= d <= N, got {b.shape}")
        err = np.max(np.abs(b.T @ b - np.eye(b.shape[1])))
        if err > ORTHO_TOL:
            raise DomainError(f"basis columns are not orthonormal (max error {err:.3g})")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T

    def __repr__(self):
        return f"Subspace(ambient_dim={self.ambient_dim}, dim={self.dim})"


@dataclass(frozen=True, eq=False)
class PrincipalAngleSpectrum:
    """Cosines of the principal angles, sorted non-increasing, clamped to [0, 1]."""

    cosines: np.ndarray

    def __post_init__(self):
        c = np.clip(np.sort(np.asarray(self.cosines, dtype=float).ravel())[::-1], 0.0, 1.0)
        c.setflags(write=False)
        object.__setattr__(self, "cosines", c)

    def __len__(self):
        return len(self.cosines)

    @property
    def angles(self) -> np.ndarray:
        return np.arccos(self.cosines)

    @property
    def affinity_sq(self) -> float:
        return float(np.sum(self.cosines ** 2))

    @property
    def affinity(self) -> float:
        return float(np.sqrt(self.affinity_sq))


def gram_schmidt(A):
    """Gram-Schmidt with one re-orthogonalization pass ("twice is enough").

    Columns are processed in their natural order; each pass removes the
    components along all previously accepted columns at once.  Returns
    ``(Q, R)`` with ``A = Q @ R``, ``R`` upper triangular with non-negative
    diagonal.  A column whose residual vanishes is left as zeros in ``Q`` with
    a zero pivot in ``R``; callers decide whether that is an error.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim == 1:
        A = A.reshape(-1, 1)
    n, d = A.shape
    Q = A.copy()
    R = np.zeros((d, d))
    for k in range(d):
        v = Q[:, k]
        if k:
            Qk = Q[:, :k]
            for _ in range(2):
                c = Qk.T @ v
                R[:k, k] += c
                v -= Qk @ c
        nrm = np.linalg.norm(v)
        R[k, k] = nrm
        if nrm > 0.0:
            v /= nrm
        else:
            v[:] = 0.0
    return Q, R


def _check_rank(s, rtol, exc, what):
    # s: singular values, any order
    smax = np.max(s)
    smin = np.min(s)
    if not smax > 0.0 or smin <= rtol * smax:
        ratio = smin / smax if smax > 0 else 0.0
        raise exc(f"{what}: smallest/largest singular value {ratio:.3g} <= {rtol:g}")


def orthonormalize(columns) -> Subspace:
    """Orthonormal basis for the column span of ``columns``.

    Raises
    ------
    RankDeficient
        If the smallest singular value is at most ``1e-8`` times the largest.
    """
    A = np.asarray(columns, dtype=float)
    if A.ndim == 1:
        A = A.reshape(-1, 1)
    if A.shape[1] > A.shape[0]:
        raise RankDeficient(f"{A.shape[1]} columns cannot be independent in R^{A.shape[0]}")
    _check_rank(np.linalg.svd(A, compute_uv=False), RANK_RTOL, RankDeficient, "orthonormalize")
    Q, _ = gram_schmidt(A)
    return Subspace(Q)


def _same_ambient(A: Subspace, B: Subspace):
    if A.ambient_dim != B.ambient_dim:
        raise AmbientMismatch(f"ambient dimensions differ: {A.ambient_dim} vs {B.ambient_dim}")


def principal_angles(A: Subspace, B: Subspace) -> PrincipalAngleSpectrum:
    """Cosines of the principal angles, i.e. the singular values of A^T B."""
    _same_ambient(A, B)
    if A.dim > B.dim:
        A, B = B, A
    s = np.linalg.svd(A.basis.T @ B.basis, compute_uv=False)
    return PrincipalAngleSpectrum(s)


def affinity(A: Subspace, B: Subspace) -> float:
    """Frobenius norm of A^T B; lies in [0, sqrt(min(dim A, dim B))]."""
    _same_ambient(A, B)
    return float(np.linalg.norm(A.basis.T @ B.basis))


def distance(A: Subspace, B: Subspace) -> float:
    """Projection F-norm distance ``||P_A - P_B||_F / sqrt(2)``.

    Evaluated from the explicit projectors, so it costs O(N^2 d); use
    :func:`distance_sq_from_affinity` inside hot loops.
    """
    _same_ambient(A, B)
    return float(np.linalg.norm(A.projector() - B.projector()) / np.sqrt(2.0))


def distance_sq_from_affinity(aff_sq, d1, d2) -> float:
    """Squared distance ``(d1 + d2)/2 - aff_sq``.

    ``aff_sq`` may exceed ``[0, min(d1, d2)]`` by at most 1e-12 (rounding);
    such values are clamped.  Anything further out raises DomainError.
    """
    d1, d2 = int(d1), int(d2)
    if d1 < 1 or d2 < 1:
        raise DomainError("dimensions must be positive")
    hi = min(d1, d2)
    if not (-1e-12 <= aff_sq <= hi + 1e-12):
        raise DomainError(f"aff_sq={aff_sq} outside [0, {hi}]")
    aff_sq = min(max(float(aff_sq), 0.0), float(hi))
    return (d1 + d2) / 2.0 - aff_sq


def same_span(A: Subspace, B: Subspace, tol=1e-9) -> bool:
    """True when one span contains the other and the dimensions agree."""
    if A.dim != B.dim:
        return False
    return abs(affinity(A, B) ** 2 - A.dim) <= tol
