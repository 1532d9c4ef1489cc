import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import near_basis, random_symmetric
from ritz_certify.errors import ComplementMissing, DimensionMismatch, IndexOutOfRange, OperatorOnly
from ritz_certify.matrix_core import SymmetricProblem, principal_angles, symmetric_eig
from ritz_certify.rayleigh_ritz import (
    assemble_tilde,
    eigsplit,
    read_decomposition_csv,
    rr_decompose,
    tilde_matrix,
    write_decomposition,
)


def test_exact_invariant_subspace():
    d = rr_decompose(np.diag([1.0, 2.0, 3.0]), np.eye(3)[:, :2], materialize_complement=True)
    assert_allclose(d.ritz_values, [1, 2])
    assert_allclose(d.residual_norms, [0, 0], atol=0)
    _, R, A3 = assemble_tilde(d)
    assert_allclose(R, 0, atol=0)
    assert_allclose(A3, [[3.0]])


def test_two_by_two_blocks(two_by_two):
    d = rr_decompose(two_by_two, np.array([1.0, 0.0]), materialize_complement=True)
    assert_allclose(d.ritz_values, [0.0])
    assert_allclose(d.residual_norms, [0.1], rtol=1e-15)
    lam, R, A3 = assemble_tilde(d)
    assert_allclose(lam, [[0.0]])
    assert_allclose(np.abs(R), [[0.1]], rtol=1e-15)
    assert_allclose(A3, [[1.0]])


def test_random_invariants(rng):
    n, k = 50, 5
    p = SymmetricProblem.from_dense(random_symmetric(rng, n))
    Q = np.linalg.qr(rng.standard_normal((n, k)))[0]
    d = rr_decompose(p, Q)
    assert np.all(np.diff(d.ritz_values) >= 0)
    assert np.linalg.norm(Q.T @ d.residual_columns, 2) <= 1e-12 * p.scale_hint
    direct = np.linalg.norm(p.dense @ d.ritz_vectors - d.ritz_vectors * d.ritz_values, axis=0)
    assert_allclose(d.residual_norms, direct, rtol=1e-13)
    assert np.max(d.residual_norms) <= d.residual_total_norm + 1e-12
    assert d.residual_total_norm <= math.sqrt(np.sum(d.residual_norms ** 2)) + 1e-12
    # Courant-Fischer
    w, _ = symmetric_eig(p)
    assert np.all(w[:k] <= d.ritz_values + 1e-12)


def test_tilde_is_unitarily_similar(rng):
    n, k = 30, 4
    A = random_symmetric(rng, n)
    d = rr_decompose(A, np.linalg.qr(rng.standard_normal((n, k)))[0], materialize_complement=True)
    T = tilde_matrix(d)
    assert_allclose(np.linalg.eigvalsh(T), np.linalg.eigvalsh(A), atol=1e-11 * d.problem.scale_hint)
    basis = np.hstack([d.ritz_vectors, d.complement])
    direct = basis.T @ A @ basis
    lead = direct[:k, :k]
    assert np.max(np.abs(lead - np.diag(np.diag(lead)))) <= 1e-13 * d.problem.scale_hint
    _, R, _ = assemble_tilde(d)
    assert_allclose(np.linalg.norm(R, axis=0), d.residual_norms, rtol=1e-13)


def test_sign_convention(rng):
    d = rr_decompose(random_symmetric(rng, 12), np.linalg.qr(rng.standard_normal((12, 3)))[0])
    for col in d.ritz_vectors.T:
        first = col[np.flatnonzero(np.abs(col) > 1e-8)[0]]
        assert first > 0


def test_eigsplit_exact_ritz_vector():
    A = np.diag([1.0, 2.0, 3.0, 4.0])
    d = rr_decompose(A, np.eye(4)[:, :2], materialize_complement=True)
    s = eigsplit(d, 0, (1.0, np.eye(4)[:, 0]))
    assert abs(abs(s.w) - 1) < 1e-15
    assert_allclose(s.y, 0, atol=1e-15)
    assert_allclose(s.z, 0, atol=1e-15)


def test_eigsplit_matches_principal_angle(two_by_two):
    d = rr_decompose(two_by_two, np.array([1.0, 0.0]), materialize_complement=True)
    w, V = symmetric_eig(two_by_two)
    s = eigsplit(d, 0, (w[0], V[:, 0]))
    assert abs(s.sin_angle - principal_angles(V[:, 0], d.ritz_vectors).spectral_sin) <= 1e-13


def test_eigsplit_unit_norm_and_angle_identity(rng):
    n, k = 20, 4
    A = random_symmetric(rng, n)
    w, V = np.linalg.eigh(A)
    d = rr_decompose(A, near_basis(rng, V[:, :k], 0.05), materialize_complement=True)
    for i in range(k):
        s = eigsplit(d, i, (w[i], V[:, i]))
        assert abs(s.w ** 2 + s.y @ s.y + s.z @ s.z - 1) <= 1e-12
        ref = principal_angles(V[:, i], d.ritz_vectors[:, i]).spectral_sin
        assert abs(s.sin_angle - ref) <= 1e-12


def test_errors():
    p = SymmetricProblem.from_operator(lambda v: v, 3)
    with pytest.raises(OperatorOnly):
        rr_decompose(p, np.eye(3)[:, :1], materialize_complement=True)
    d = rr_decompose(p, np.eye(3)[:, :1])
    assert_allclose(d.residual_norms, [0.0])
    with pytest.raises(ComplementMissing):
        assemble_tilde(d)
    with pytest.raises(DimensionMismatch):
        rr_decompose(np.eye(3), np.eye(4)[:, :1])
    d = rr_decompose(np.eye(3), np.eye(3)[:, :1], materialize_complement=True)
    with pytest.raises(IndexOutOfRange):
        eigsplit(d, 2, (1.0, np.eye(3)[:, 0]))


def test_dump_round_trip(tmp_path, rng):
    d = rr_decompose(random_symmetric(rng, 9), np.linalg.qr(rng.standard_normal((9, 3)))[0])
    write_decomposition(d, tmp_path, "dump")
    vals, norms = read_decomposition_csv(tmp_path / "dump.csv")
    assert_allclose(vals, d.ritz_values, rtol=0, atol=0)
    assert_allclose(norms, d.residual_norms, rtol=0, atol=0)
    assert_allclose(np.load(tmp_path / "dump_ritz_vectors.npy"), d.ritz_vectors)
