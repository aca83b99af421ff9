import numpy as np
import pytest

from subrip.core import Subspace, affinity, orthonormalize
from subrip.errors import AmbientMismatch, DimensionOrder, DomainError, RankCollapse, RankDeficient
from subrip.generator import PairSpec, make_pair
from subrip.projection import (
    affinity_via_quasi_basis,
    column_normalized_with_gram,
    make_projector,
    normalized_columns,
    project,
    project_many,
    quasi_affinity_check,
    quasi_ortho_report,
)


def axes(N, k):
    return Subspace(np.eye(N)[:, :k])


class TestProjector:
    def test_deterministic(self):
        a, b = make_projector(2, 5, 7), make_projector(2, 5, 7)
        np.testing.assert_array_equal(a.matrix, b.matrix)
        assert not np.array_equal(a.matrix, make_projector(2, 5, 8).matrix)

    def test_entry_statistics(self):
        P = make_projector(100, 500, 1)
        m = P.matrix
        assert 0.009 <= m.var() <= 0.011
        assert abs(m.mean()) <= 4 * np.sqrt(1 / 100) / np.sqrt(m.size)

    def test_dimension_order(self):
        with pytest.raises(DimensionOrder):
            make_projector(500, 200, 0)
        with pytest.raises(DimensionOrder):
            make_projector(5, 5, 0)

    def test_matrix_read_only(self):
        with pytest.raises(ValueError):
            make_projector(2, 5, 0).matrix[0, 0] = 1.0


class TestProject:
    def test_line_keeps_dim(self):
        Y = project(make_projector(200, 500, 3), axes(500, 1))
        assert (Y.ambient_dim, Y.dim) == (200, 1)

    def test_same_input_same_image(self):
        P = make_projector(200, 500, 3)
        assert affinity(project(P, axes(500, 5)), project(P, axes(500, 5))) == pytest.approx(np.sqrt(5))

    def test_orthogonal_lines_become_correlated(self):
        X1 = Subspace(np.eye(500)[:, [0]])
        X2 = Subspace(np.eye(500)[:, [1]])
        hits = sum(affinity(project(make_projector(200, 500, s), X1), project(make_projector(200, 500, s), X2)) > 1e-6
                   for s in range(1000))
        assert hits >= 990

    def test_errors(self):
        P = make_projector(4, 10, 0)
        with pytest.raises(AmbientMismatch):
            project(P, axes(9, 2))
        with pytest.raises(RankCollapse):
            project(P, axes(10, 4))

    def test_project_many_matches_project(self, rng):
        P = make_projector(30, 80, 2)
        Xs = [orthonormalize(rng.standard_normal((80, d))) for d in (1, 3, 5)]
        for Y, X in zip(project_many(P, Xs), Xs):
            np.testing.assert_allclose(Y.basis, project(P, X).basis, atol=1e-12)
        assert project_many(P, []) == []


class TestNormalizedColumns:
    def test_unit_norm_same_span(self, rng):
        P = make_projector(50, 120, 4)
        X = orthonormalize(rng.standard_normal((120, 4)))
        A = normalized_columns(P, X)
        np.testing.assert_allclose(np.linalg.norm(A, axis=0), 1.0, atol=1e-12)
        assert affinity(orthonormalize(A), project(P, X)) ** 2 == pytest.approx(4.0, abs=1e-10)

    def test_line_equals_project(self):
        P = make_projector(50, 120, 4)
        X = axes(120, 1)
        np.testing.assert_allclose(normalized_columns(P, X), project(P, X).basis, atol=1e-14)

    def test_gram_offdiag_shrinks_with_n(self):
        X = axes(1001, 3)

        def med(n):
            vals = []
            for s in range(200):
                A = normalized_columns(make_projector(n, 1001, s), X)
                G = A.T @ A
                vals.extend(np.abs(G[np.triu_indices(3, 1)]))
            return np.median(vals)

        assert med(1000) < med(100)


class TestQuasiOrtho:
    def test_orthonormal_input(self):
        rep = quasi_ortho_report(np.eye(6)[:, :3])
        assert rep.r_norm == 0.0
        np.testing.assert_allclose(rep.U_bar, 0.0, atol=1e-15)

    def test_two_column_closed_form(self):
        r = 0.1
        A = np.array([[1.0, r], [0.0, np.sqrt(1 - r * r)], [0.0, 0.0]])
        rep = quasi_ortho_report(A)
        # independent derivation: v2 = (a2 - r a1)/sqrt(1-r^2) = a2 (1/s) + a1 (-r/s)
        s = np.sqrt(1 - r * r)
        assert rep.U_bar[0, 1] == pytest.approx(-r / s, abs=1e-12)
        assert rep.U_bar[1, 1] == pytest.approx(1 / s - 1, abs=1e-12)
        assert rep.U_bar[0, 1] == pytest.approx(-0.100504, abs=1e-6)
        assert rep.U_bar[1, 1] == pytest.approx(0.005038, abs=1e-6)
        assert rep.U_bar[0, 0] == 0.0
        assert rep.R_bar[0, 1] == pytest.approx(r) and rep.R_bar[1, 0] == pytest.approx(r)

    def test_reconstruction_and_triangular(self, rng):
        for _ in range(10):
            A = rng.standard_normal((40, 6))
            A /= np.linalg.norm(A, axis=0)
            rep = quasi_ortho_report(A)
            assert np.all(np.tril(rep.U_bar, -1) == 0.0)
            assert rep.reconstruction_error <= 1e-8
            np.testing.assert_allclose(rep.V.T @ rep.V, np.eye(6), atol=1e-12)

    def test_errors(self):
        with pytest.raises(DomainError):
            quasi_ortho_report(np.array([[2.0, 0.0], [0.0, 1.0]]))
        with pytest.raises(RankDeficient):
            quasi_ortho_report(np.array([[1.0, 1.0], [0.0, 0.0]]))
        with pytest.raises(RankDeficient):
            quasi_ortho_report(np.ones((2, 3)) / np.sqrt(2))

    def test_prescribed_gram(self, rng):
        G = np.array([[1.0, 0.3, -0.2], [0.3, 1.0, 0.1], [-0.2, 0.1, 1.0]])
        A = column_normalized_with_gram(G, 20, 5)
        np.testing.assert_allclose(A.T @ A, G, atol=1e-12)
        with pytest.raises(RankDeficient):
            column_normalized_with_gram(np.ones((2, 2)), 5, 0)
        with pytest.raises(DomainError):
            column_normalized_with_gram(2 * np.eye(2), 5, 0)


class TestQuasiAffinity:
    def test_line_exact(self):
        X1, X2, _ = make_pair(PairSpec(300, 1, 6, 0.6, seed=1))
        P = make_projector(100, 300, 2)
        assert affinity_via_quasi_basis(P, X1, X2) == pytest.approx(affinity(project(P, X1), project(P, X2)), abs=1e-10)

    def test_fig4_geometry_relative_error(self):
        X1, X2, _ = make_pair(PairSpec(500, 5, 10, np.sqrt(2), seed=3))
        worst = 0.0
        for s in range(100):
            c = quasi_affinity_check(make_projector(200, 500, s), X1, X2)
            worst = max(worst, c.gap / c.exact ** 2)
        assert worst < 0.1

    def test_contained_case(self):
        X = axes(400, 3)
        for s in range(20):
            c = quasi_affinity_check(make_projector(150, 400, s), X, X)
            assert c.exact ** 2 == pytest.approx(3.0)
            assert c.within_bound

    def test_order_enforced(self):
        P = make_projector(20, 50, 0)
        with pytest.raises(DomainError):
            affinity_via_quasi_basis(P, axes(50, 3), axes(50, 2))
