import numpy as np
import pytest

from subrip.core import affinity, distance, principal_angles
from subrip.errors import DomainError, Infeasible, SpectrumInfeasible
from subrip.generator import PairSpec, make_pair, make_set, random_orthonormal


class TestFrames:
    def test_square(self):
        W = random_orthonormal(5, 5, 1)
        assert abs(abs(np.linalg.det(W)) - 1) < 1e-10

    def test_deterministic(self):
        np.testing.assert_array_equal(random_orthonormal(500, 15, 3), random_orthonormal(500, 15, 3))

    def test_orthonormal(self):
        for s in range(100):
            W = random_orthonormal(40, 6, s)
            assert np.max(np.abs(W.T @ W - np.eye(6))) < 1e-10

    def test_haar_first_coordinate(self):
        # for a Haar frame, w_1[0]^2 ~ Beta(1/2, (N-1)/2) with mean 1/N
        x = np.array([random_orthonormal(10, 1, s)[0, 0] ** 2 for s in range(4000)])
        assert abs(x.mean() - 0.1) < 4 * np.sqrt(2 * 9 / (100 * 12) / 4000)

    def test_domain(self):
        with pytest.raises(DomainError):
            random_orthonormal(3, 4, 0)


class TestPairSpec:
    def test_infeasible(self):
        with pytest.raises(Infeasible):
            PairSpec(10, 5, 6, 1.0)

    def test_bad_target(self):
        with pytest.raises(DomainError):
            PairSpec(50, 2, 3, 1.5)
        with pytest.raises(DomainError):
            PairSpec(50, 3, 2, 0.5)

    def test_explicit_validation(self):
        with pytest.raises(DomainError):
            PairSpec(50, 2, 3, 1.0, spectrum=(1.0,))
        with pytest.raises(DomainError):
            PairSpec(50, 2, 3, 1.0, spectrum=(0.5, 0.5))
        with pytest.raises(DomainError):
            PairSpec.explicit(50, 3, [1.2, 0.0])
        assert PairSpec.explicit(50, 3, [0.6, 0.8]).spectrum_mode == "explicit"


class TestMakePair:
    def test_orthogonal(self):
        X1, X2, sp = make_pair(PairSpec(100, 3, 4, 0.0, seed=2))
        assert affinity(X1, X2) < 1e-10
        assert np.all(sp.cosines == 0)

    def test_containment(self):
        X1, X2, _ = make_pair(PairSpec.explicit(100, 7, [1.0] * 4, seed=5))
        assert distance(X1, X2) ** 2 == pytest.approx((7 - 4) / 2, abs=1e-10)

    def test_fig4_round_trip(self):
        X1, X2, sp = make_pair(PairSpec(500, 5, 10, 2.0, seed=11))
        assert affinity(X1, X2) ** 2 == pytest.approx(4.0, abs=1e-9)
        np.testing.assert_allclose(principal_angles(X1, X2).cosines, sp.cosines, atol=1e-10)
        assert (X1.dim, X2.dim) == (5, 10)

    def test_deterministic(self):
        a = make_pair(PairSpec(60, 2, 5, 1.0, seed=4))
        b = make_pair(PairSpec(60, 2, 5, 1.0, seed=4))
        np.testing.assert_array_equal(a[0].basis, b[0].basis)
        np.testing.assert_array_equal(a[1].basis, b[1].basis)

    def test_spectrum_infeasible(self):
        with pytest.raises(SpectrumInfeasible):
            make_pair(PairSpec(100, 5, 5, np.sqrt(5) * 0.999, seed=0))

    def test_d1_one_full_affinity(self):
        X1, X2, sp = make_pair(PairSpec(20, 1, 3, 1.0, seed=0))
        assert sp.cosines[0] == pytest.approx(1.0)


class TestMakeSet:
    def test_independent(self):
        S = make_set(500, 5, 3, seed=1)
        assert len(S) == 3 and all(X.dim == 5 for X in S)
        assert len(make_set(500, 5, 1, seed=1)) == 1

    def test_independent_expected_affinity(self):
        vals = [affinity(*make_set(500, 5, 2, seed=s)) ** 2 for s in range(500)]
        # E aff^2 = d * d / N for independent Haar subspaces
        assert np.mean(vals) == pytest.approx(25 / 500, rel=0.1)

    def test_prescribed_orthogonal(self):
        S = make_set(500, 5, 3, seed=1, targets=[0, 0, 0])
        for i in range(3):
            for j in range(i + 1, 3):
                assert affinity(S[i], S[j]) < 1e-9

    def test_prescribed_pairwise(self):
        d = 4
        S = make_set(100, d, 3, seed=2, targets=[1.0, 1.5, 0.5])
        assert affinity(S[0], S[1]) == pytest.approx(1.0 * 1.5 / np.sqrt(d), abs=1e-10)
        assert affinity(S[1], S[2]) == pytest.approx(1.5 * 0.5 / np.sqrt(d), abs=1e-10)

    def test_prescribed_capacity(self):
        with pytest.raises(Infeasible):
            make_set(20, 5, 4, seed=0, targets=[0, 0, 0, 0])
        with pytest.raises(DomainError):
            make_set(100, 5, 2, seed=0, targets=[0.0])
