import numpy as np
import pytest
from numpy.testing import assert_allclose

from ritz_certify.bounds_subspace import subspace_bounds, subspace_inputs
from ritz_certify.bounds_svd import (
    NORMS,
    project_svd,
    svd_bounds,
    svd_boundvec,
    svd_gaps,
    svd_oracle,
    svd_sin22,
    svd_sin2indiv,
)
from ritz_certify.errors import DimensionMismatch, ValidationError
from ritz_certify.gap_model import ESTIMATED
from ritz_certify.harness.experiments import planted_matrix, sketch_bases
from ritz_certify.rayleigh_ritz import rr_decompose


def _noisy(rng, B, noise):
    return np.linalg.qr(B + noise * rng.standard_normal(B.shape))[0]


def _setup(M, U, V, k1):
    proj = project_svd(M, U, V, k1)
    oracle = svd_oracle(M, proj)
    return proj, oracle, svd_gaps(proj, oracle.singulars)


def test_exact_singular_subspaces(rng):
    M = planted_matrix(rng, 30, 20)
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    proj, oracle, gaps = _setup(M, U[:, :5], Vt[:5].T, 3)
    scale = s[0]
    assert np.max(np.abs(proj.R)) <= 1e-13 * scale
    assert np.max(np.abs(proj.S)) <= 1e-13 * scale
    assert_allclose(proj.sigma_hat, s[:5], rtol=1e-12)
    for rep in svd_bounds(proj, gaps).values():
        assert rep.value <= 1e-12


def test_reassembly_and_coupling(rng):
    M = rng.standard_normal((40, 25))
    U = np.linalg.qr(rng.standard_normal((40, 8)))[0]
    V = np.linalg.qr(rng.standard_normal((25, 6)))[0]
    proj = project_svd(M, U, V, 3)
    T = proj.tilde_matrix()
    assert_allclose(np.linalg.svd(T, compute_uv=False), np.linalg.svd(M, compute_uv=False),
                    atol=1e-11 * np.linalg.norm(M, 2))
    assert np.all(np.diff(proj.sigma_hat) <= 0) and np.all(proj.sigma_hat >= 0)
    coupling = proj.U_hat[:, :3].T @ M @ proj.V_hat[:, 3:]
    assert np.max(np.abs(coupling)) <= 1e-13 * np.linalg.norm(M, 2)
    inner = proj.U_hat[:, 3:].T @ M @ proj.V_hat[:, :3]
    assert np.max(np.abs(inner)) <= 1e-13 * np.linalg.norm(M, 2)


def test_one_sided_projection(rng):
    M = planted_matrix(rng, 30, 12)
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    proj, oracle, gaps = _setup(M, _noisy(rng, U[:, :6], 1e-3), np.eye(12), 3)
    assert proj.R.shape[1] == 0
    assert proj.S.shape[0] == 30 - 6
    reps = svd_bounds(proj, gaps)
    for rep in reps.values():
        if rep.applicable:
            assert rep.value >= oracle.theta_spectral - 1e-12
    # the r-terms vanish and the formula falls back to the S side
    rep = svd_sin2indiv(proj, gaps, "spectral")
    c = np.linalg.norm(proj.S2, axis=0)
    assert_allclose(rep.inputs["S2"], np.sum(c ** 2 / gaps.pair_dists[:c.size]), rtol=1e-13)


def test_zero_residual_and_kprime_zero(rng):
    M = planted_matrix(rng, 20, 15)
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    proj, oracle, gaps = _setup(M, _noisy(rng, U[:, :4], 1e-3), _noisy(rng, Vt[:4].T, 1e-3), 4)
    top = max(np.linalg.norm(proj.R1, 2), np.linalg.norm(proj.S1, 2))
    assert_allclose(svd_sin2indiv(proj, gaps).value, top / gaps.Gap, rtol=1e-14)
    assert_allclose(svd_sin22(proj, gaps).value, top / gaps.Gap, rtol=1e-14)


def test_sin22_boundary_inapplicable(rng):
    M = planted_matrix(rng, 20, 15)
    U = np.linalg.qr(rng.standard_normal((20, 5)))[0]
    V = np.linalg.qr(rng.standard_normal((15, 5)))[0]
    proj = project_svd(M, U, V, 2)
    oracle = svd_oracle(M, proj)
    gaps = svd_gaps(proj, oracle.singulars)
    c2 = max(np.linalg.norm(proj.R2, 2), np.linalg.norm(proj.S2, 2))
    from dataclasses import replace
    edge = replace(gaps, Gap=c2 ** 2 / gaps.gap, gap=gaps.gap)
    if edge.Gap > 0 and edge.gap > 0:
        assert not svd_sin22(proj, edge).applicable


def test_spd_matches_subspace(rng):
    n, k, k1 = 30, 6, 2
    Q = np.linalg.qr(rng.standard_normal((n, n)))[0]
    w = np.sort(rng.uniform(0.1, 1.0, n))[::-1]
    w[:k] += np.array([3.0, 2.5, 1.6, 1.5, 1.4, 1.3])
    M = (Q * w) @ Q.T
    M = (M + M.T) / 2
    T = _noisy(rng, Q[:, :k], 1e-3)
    proj = project_svd(M, T, T, k1)
    gaps = svd_gaps(proj, np.linalg.svd(M, compute_uv=False))
    sv = svd_bounds(proj, gaps)
    d = rr_decompose(M, T, materialize_complement=True)
    eigs = np.linalg.eigvalsh(M)
    inp = subspace_inputs(d, k1, eigs, target=[k - 1, k - 2], eig_indices=[n - 1, n - 2])
    sub = subspace_bounds(inp)
    for fam in ("boundvec", "sin22", "sin2indiv"):
        a, b = sv[(f"svd_{fam}", "spectral")], sub[(f"subspace_{fam}", "spectral")]
        assert a.applicable == b.applicable
        assert abs(a.value - b.value) <= 1e-10 * max(1.0, b.value)


def test_graded_sketch_sin22_tighter(rng):
    M = planted_matrix(rng, 60, 40)
    U, V = sketch_bases(rng, M, 8, 10, 3)
    proj, oracle, gaps = _setup(M, U, V, 4)
    assert np.linalg.norm(proj.R1, 2) < np.linalg.norm(proj.R, 2)
    assert svd_sin22(proj, gaps).value <= svd_boundvec(proj, gaps).value


def test_transpose_and_scaling(rng):
    M = planted_matrix(rng, 25, 18)
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    Ut, Vtr = _noisy(rng, U[:, :7], 1e-2), _noisy(rng, Vt[:5].T, 1e-2)
    proj, oracle, gaps = _setup(M, Ut, Vtr, 3)
    base = svd_bounds(proj, gaps)
    projT, oT, gT = _setup(M.T, Vtr, Ut, 3)
    projS, oS, gS = _setup(4.0 * M, Ut, Vtr, 3)
    for other in (svd_bounds(projT, gT), svd_bounds(projS, gS)):
        assert other.keys() == base.keys()
        for key, rep in base.items():
            if rep.applicable:
                assert abs(other[key].value - rep.value) <= 1e-13 * max(1.0, rep.value)


def test_soundness_random(rng):
    checked = 0
    for trial in range(120):
        m = int(rng.integers(15, 40))
        n = int(rng.integers(10, m + 1))
        M = planted_matrix(rng, m, n, decay=rng.uniform(0.5, 0.85))
        k_m = int(rng.integers(2, 9))
        one_sided = trial % 10 == 0
        k_n = k_m if one_sided else int(rng.integers(2, 9))
        k1 = int(rng.integers(1, min(k_m, k_n) + 1))
        U, V = sketch_bases(rng, M, k_m, k_n, int(rng.integers(0, 4)))
        if one_sided:
            V = np.eye(n)
        proj, oracle, gaps = _setup(M, U, V, k1)
        for (name, norm), rep in svd_bounds(proj, gaps).items():
            if rep.applicable:
                theta = oracle.theta_frobenius if norm == "frobenius" else oracle.theta_spectral
                assert rep.value >= theta - 1e-12, (name, norm, rep.value, theta)
                checked += 1
    assert checked > 200


def test_modes_and_errors(rng):
    M = planted_matrix(rng, 12, 10)
    U = np.linalg.qr(rng.standard_normal((12, 3)))[0]
    V = np.linalg.qr(rng.standard_normal((10, 3)))[0]
    proj = project_svd(M, U, V, 2)
    est = svd_gaps(proj, mode=ESTIMATED)
    assert est.sigma_min == proj.sigma_hat[1]
    for rep in svd_bounds(proj, est).values():
        assert not rep.certified
        assert rep.norm in NORMS
    with pytest.raises(ValidationError):
        svd_gaps(proj)
    with pytest.raises(ValidationError):
        project_svd(M, U, V, 4)
    with pytest.raises(DimensionMismatch):
        project_svd(M, V, V, 1)
