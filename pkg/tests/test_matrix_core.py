import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from ritz_certify.errors import (
    DimensionMismatch,
    DimensionTooLarge,
    OperatorOnly,
    RankDeficient,
    ValidationError,
)
from ritz_certify.matrix_core import (
    SymmetricProblem,
    full_svd,
    orthogonal_complement,
    orthonormality_error,
    orthonormalize,
    principal_angles,
    symmetric_eig,
)


def random_orthonormal(rng, n, k):
    return np.linalg.qr(rng.standard_normal((n, k)))[0]


class TestSymmetricEig:
    def test_identity(self):
        w, V = symmetric_eig(SymmetricProblem.from_dense(np.eye(2)))
        assert_allclose(w, [1.0, 1.0])
        assert orthonormality_error(V) < 1e-15

    def test_two_by_two_quadratic_formula(self):
        w, _ = symmetric_eig(SymmetricProblem.from_dense([[0, 0.1], [0.1, 1]]))
        # roots of t^2 - t - 0.01
        assert_allclose(w, [(1 - math.sqrt(1.04)) / 2, (1 + math.sqrt(1.04)) / 2], rtol=0, atol=1e-15)

    def test_laplacian_closed_form(self):
        n = 10
        p = SymmetricProblem.from_tridiagonal(2 * np.ones(n), -np.ones(n - 1))
        w, V = symmetric_eig(p)
        j = np.arange(1, n + 1)
        assert_allclose(w, 2 - 2 * np.cos(j * np.pi / (n + 1)), atol=1e-14)
        dense = p.to_dense()
        assert_allclose(w, np.linalg.eigvalsh(dense), atol=1e-13)
        assert np.max(np.linalg.norm(dense @ V - V * w, axis=0)) <= 1e-12 * n * p.scale_hint

    def test_residual_tolerance_random(self):
        rng = np.random.default_rng(0)
        n = 60
        A = rng.standard_normal((n, n))
        p = SymmetricProblem.from_dense(A + A.T)
        w, V = symmetric_eig(p)
        assert np.all(np.diff(w) >= 0)
        assert np.max(np.linalg.norm(p.dense @ V - V * w, axis=0)) <= 1e-12 * n * p.scale_hint

    def test_operator_only(self):
        p = SymmetricProblem.from_operator(lambda v: 2 * v, 4)
        with pytest.raises(OperatorOnly):
            symmetric_eig(p)

    def test_dimension_cap(self, monkeypatch):
        monkeypatch.setenv("RITZ_MAX_N", "5")
        with pytest.raises(DimensionTooLarge):
            symmetric_eig(SymmetricProblem.from_dense(np.eye(6)))


class TestSymmetricProblem:
    def test_rejects_asymmetric(self):
        with pytest.raises(ValidationError):
            SymmetricProblem.from_dense([[1.0, 0.0], [1e-3, 1.0]])

    def test_rejects_nonsquare(self):
        with pytest.raises(DimensionMismatch):
            SymmetricProblem.from_dense(np.zeros((2, 3)))

    def test_tridiagonal_apply_matches_dense(self):
        rng = np.random.default_rng(1)
        d, e = rng.standard_normal(7), rng.standard_normal(6)
        p = SymmetricProblem.from_tridiagonal(d, e)
        V = rng.standard_normal((7, 3))
        assert_allclose(p.apply(V), p.to_dense() @ V, atol=1e-14)
        assert_allclose(p.apply(V[:, 0]), p.to_dense() @ V[:, 0], atol=1e-14)

    def test_operator_symmetry_probe(self):
        rng = np.random.default_rng(2)
        B = rng.standard_normal((8, 8))
        A = B + B.T
        p = SymmetricProblem.from_operator(lambda v: A @ v, 8, scale_hint=np.linalg.norm(A, 2))
        assert p.symmetry_defect(np.random.default_rng(3)) <= 1e-12
        q = SymmetricProblem.from_operator(lambda v: B @ v, 8, scale_hint=np.linalg.norm(B, 2))
        assert q.symmetry_defect(np.random.default_rng(3)) > 1e-3


class TestFullSvd:
    def test_diagonal(self):
        U, s, V = full_svd(np.diag([3.0, 1.0]))
        assert_allclose(s, [3, 1])
        assert_allclose(np.abs(U), np.eye(2), atol=1e-15)
        assert_allclose(np.abs(V), np.eye(2), atol=1e-15)

    def test_zero(self):
        _, s, _ = full_svd(np.zeros((3, 2)))
        assert_allclose(s, 0)

    def test_reconstruction(self):
        M = np.random.default_rng(4).standard_normal((5, 3))
        U, s, V = full_svd(M)
        assert np.all(np.diff(s) <= 0) and np.all(s >= 0)
        assert np.linalg.norm(M - (U * s) @ V.T, 2) <= 1e-12 * 5 * np.linalg.norm(M, 2)

    def test_dimension_cap(self, monkeypatch):
        monkeypatch.setenv("RITZ_MAX_N", "4")
        with pytest.raises(DimensionTooLarge):
            full_svd(np.zeros((5, 2)))


class TestOrthonormalize:
    def test_already_orthonormal(self):
        Q0 = random_orthonormal(np.random.default_rng(5), 9, 3)
        Q = orthonormalize(Q0)
        assert principal_angles(Q0, Q).spectral_sin <= 1e-12

    def test_gram_schmidt_by_hand(self):
        e1, e2 = np.eye(3)[:, 0], np.eye(3)[:, 1]
        Q = orthonormalize(np.column_stack([e1, e1 + 1e-3 * e2]))
        # Gram-Schmidt: q1 = e1, q2 = e2
        assert_allclose(Q, np.column_stack([e1, e2]), atol=1e-12)
        assert orthonormality_error(Q) <= 1e-13 * math.sqrt(2)

    def test_repeated_column(self):
        e1 = np.eye(3)[:, 0]
        with pytest.raises(RankDeficient) as info:
            orthonormalize(np.column_stack([e1, e1]))
        assert info.value.rank == 1

    def test_complement(self):
        Q = random_orthonormal(np.random.default_rng(6), 7, 2)
        C = orthogonal_complement(Q)
        assert C.shape == (7, 5)
        assert np.linalg.norm(Q.T @ C) <= 1e-14
        assert orthonormality_error(C) <= 1e-14


class TestPrincipalAngles:
    def test_same_line(self):
        e1 = np.eye(3)[:, :1]
        assert_allclose(principal_angles(e1, e1).sines, [0.0])

    def test_orthogonal_lines(self):
        I3 = np.eye(3)
        assert_allclose(principal_angles(I3[:, :1], I3[:, 1:2]).sines, [1.0])

    def test_rotation(self):
        t = 0.3
        x = np.array([math.cos(t), math.sin(t), 0.0])
        pa = principal_angles(x, np.eye(3)[:, 0])
        assert_allclose(pa.sines, [math.sin(t)], atol=1e-15)

    def test_symmetry_and_rotation_invariance(self):
        rng = np.random.default_rng(7)
        X = random_orthonormal(rng, 10, 3)
        Y = random_orthonormal(rng, 10, 3)
        G = random_orthonormal(rng, 3, 3)
        a = principal_angles(X, Y).sines
        assert_allclose(principal_angles(Y, X).sines, a, atol=1e-13)
        assert_allclose(principal_angles(X @ G, Y).sines, a, atol=1e-13)
        assert_allclose(principal_angles(X, Y @ G).sines, a, atol=1e-13)

    def test_cosine_identity_and_norm_ordering(self):
        rng = np.random.default_rng(8)
        x = rng.standard_normal(6)
        y = rng.standard_normal(6)
        x, y = x / np.linalg.norm(x), y / np.linalg.norm(y)
        s = principal_angles(x, y).spectral_sin
        assert abs(s ** 2 + (x @ y) ** 2 - 1) <= 1e-13
        X = random_orthonormal(rng, 12, 3)
        Y = random_orthonormal(rng, 12, 5)
        pa = principal_angles(X, Y)
        assert pa.sines.size == 3
        assert np.all(np.diff(pa.sines) <= 0)
        assert np.all((pa.sines >= 0) & (pa.sines <= 1 + 1e-14))
        assert pa.spectral_sin <= pa.frobenius_sin <= math.sqrt(3) * pa.spectral_sin + 1e-15

    def test_complement_form_matches_cosines(self):
        rng = np.random.default_rng(9)
        X = random_orthonormal(rng, 8, 2)
        Y = random_orthonormal(rng, 8, 3)
        cos = np.linalg.svd(X.T @ Y, compute_uv=False)
        assert_allclose(principal_angles(X, Y).sines, np.sort(np.sqrt(1 - cos ** 2))[::-1], atol=1e-12)
        Yp = orthogonal_complement(Y)
        assert_allclose(principal_angles(X, Y).sines, np.linalg.svd(Yp.T @ X, compute_uv=False), atol=1e-14)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            principal_angles(np.eye(3)[:, :1], np.eye(4)[:, :1])
        with pytest.raises(DimensionMismatch):
            principal_angles(np.eye(3)[:, :2], np.eye(3)[:, :1])
