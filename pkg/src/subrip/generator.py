"""Seeded construction of random frames, subspace pairs with a prescribed
affinity, and finite subspace sets."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PrincipalAngleSpectrum, Subspace
from .errors import DomainError, Infeasible, SpectrumInfeasible
from .rng import derive_seed, gaussian, uniform_stream

MAX_SPECTRUM_DRAWS = 1000


def random_orthonormal(N: int, k: int, seed: int) -> np.ndarray:
    """Haar-distributed ``N x k`` orthonormal frame.

    QR of an i.i.d. Gaussian matrix with the signs fixed so that ``R`` has a
    positive diagonal.
    """
    N, k = int(N), int(k)
    if not (1 <= k <= N):
        raise DomainError(f"need 1 <= k <= N, got k={k}, N={N}")
    Q, R = np.linalg.qr(gaussian(seed, (N, k)))
    s = np.sign(np.diag(R))
    s[s == 0] = 1.0
    return Q * s


@dataclass(frozen=True)
class PairSpec:
    """Inputs of the two-subspace construction.

    ``spectrum=None`` draws the cosines uniformly on [0, 1] and rescales them
    to ``target_affinity`` (redrawing while any exceeds 1); an explicit
    spectrum is used as given.
    """

    N: int
    d1: int
    d2: int
    target_affinity: float
    seed: int = 0
    spectrum: tuple | None = None

    def __post_init__(self):
        if not (1 <= self.d1 <= self.d2):
            raise DomainError(f"need 1 <= d1 <= d2, got d1={self.d1}, d2={self.d2}")
        if self.d1 + self.d2 > self.N:
            raise Infeasible(f"d1 + d2 = {self.d1 + self.d2} exceeds N = {self.N}")
        a2 = self.target_affinity ** 2
        if self.target_affinity < 0 or a2 > self.d1 * (1 + 1e-12):
            raise DomainError(f"target affinity {self.target_affinity} outside [0, sqrt({self.d1})]")
        if self.spectrum is not None:
            lam = tuple(float(x) for x in self.spectrum)
            if len(lam) != self.d1:
                raise DomainError(f"spectrum needs {self.d1} entries, got {len(lam)}")
            if any(x < 0.0 or x > 1.0 for x in lam):
                raise DomainError("spectrum entries must lie in [0, 1]")
            if abs(sum(x * x for x in lam) - a2) > 1e-10:
                raise DomainError("sum of squared spectrum entries must equal target_affinity^2")
            object.__setattr__(self, "spectrum", lam)

    @property
    def spectrum_mode(self) -> str:
        return "uniform_scaled" if self.spectrum is None else "explicit"

    @classmethod
    def explicit(cls, N, d2, spectrum, seed=0):
        lam = tuple(float(x) for x in spectrum)
        return cls(N, len(lam), d2, float(np.sqrt(sum(x * x for x in lam))), seed, lam)


def _uniform_scaled_spectrum(d1, aff, seed):
    gen = uniform_stream(derive_seed(seed, 0, "spectrum"))
    if aff == 0.0:
        return np.zeros(d1)
    for _ in range(MAX_SPECTRUM_DRAWS):
        raw = gen.random(d1)
        nrm = np.linalg.norm(raw)
        if nrm == 0.0:
            continue
        lam = aff * raw / nrm
        if lam.max() <= 1.0:
            return lam
    raise SpectrumInfeasible(
        f"no uniform draw placed all {d1} cosines in [0, 1] for affinity {aff} "
        f"after {MAX_SPECTRUM_DRAWS} attempts"
    )


def make_pair(spec: PairSpec) -> tuple[Subspace, Subspace, PrincipalAngleSpectrum]:
    """Two subspaces with affinity ``spec.target_affinity``.

    With a frame ``W = [w_1 .. w_{d1+d2}]``: ``X2 = span(w_1..w_{d2})`` and
    the i-th basis vector of ``X1`` is ``lambda_i w_i + sqrt(1 - lambda_i^2)
    w_{d2+i}``, so the cosines of the principal angles are exactly the
    ``lambda_i``.
    """
    d1, d2 = spec.d1, spec.d2
    if spec.spectrum is None:
        lam = _uniform_scaled_spectrum(d1, float(spec.target_affinity), spec.seed)
    else:
        lam = np.array(spec.spectrum)
    W = random_orthonormal(spec.N, d1 + d2, derive_seed(spec.seed, 0, "frame"))
    U2 = W[:, :d2]
    U1 = W[:, :d1] * lam + W[:, d2:d2 + d1] * np.sqrt(1.0 - lam ** 2)
    return Subspace(U1), Subspace(U2), PrincipalAngleSpectrum(lam)


def make_set(N: int, d: int, L: int, seed: int, targets=None) -> list[Subspace]:
    """``L`` subspaces of dimension ``d`` in R^N.

    ``targets=None`` draws each basis independently from the Haar measure.
    Otherwise ``targets`` lists, for each subspace, its affinity to a shared
    anchor ``span(w_1..w_d)``; subspace k gets equal cosines ``a_k/sqrt(d)``
    against the anchor and its own private block ``w``, so distinct members
    ``k, l`` have affinity ``a_k a_l / sqrt(d)``.  This needs ``d (L + 1) <= N``.
    """
    N, d, L = int(N), int(d), int(L)
    if L < 1 or not (1 <= d <= N):
        raise DomainError(f"need L >= 1 and 1 <= d <= N, got L={L}, d={d}, N={N}")
    if targets is None:
        return [Subspace(random_orthonormal(N, d, derive_seed(seed, k, "set"))) for k in range(L)]

    targets = [float(a) for a in targets]
    if len(targets) != L:
        raise DomainError(f"expected {L} targets, got {len(targets)}")
    if d * (L + 1) > N:
        raise Infeasible(f"a shared frame for L={L} subspaces of dim {d} needs N >= {d * (L + 1)}")
    W = random_orthonormal(N, d * (L + 1), derive_seed(seed, 0, "set-frame"))
    anchor = W[:, :d]
    out = []
    for k, a in enumerate(targets):
        if a < 0 or a * a > d * (1 + 1e-12):
            raise DomainError(f"target {a} outside [0, sqrt({d})]")
        lam = min(a / np.sqrt(d), 1.0)
        private = W[:, d * (k + 1):d * (k + 2)]
        out.append(Subspace(lam * anchor + np.sqrt(1.0 - lam * lam) * private))
    return out
