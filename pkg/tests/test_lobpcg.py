import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import random_symmetric
from ritz_certify.bounds_eigen import eigen_bounds
from ritz_certify.errors import ValidationError
from ritz_certify.gap_model import estimated_gaps
from ritz_certify.harness.experiments import laplacian_eigenpair, laplacian_problem
from ritz_certify.harness.report import read_csv
from ritz_certify.lobpcg import BreakdownRestart, _search_basis, lobpcg_run
from ritz_certify.matrix_core import orthonormality_error


def test_diagonal_convergence():
    state = lobpcg_run(np.diag(np.arange(1.0, 31.0)), 3, iters=60, seed=0)
    assert_allclose(state.ritz_values, [1.0, 2.0, 3.0], atol=1e-8)
    assert orthonormality_error(state.X) <= 1e-12
    assert len(state.history) == 61
    assert all(np.all(h.residual_norms >= 0) for h in state.history)


def test_courant_fischer_every_iteration(rng):
    A = random_symmetric(rng, 60)
    w = np.linalg.eigvalsh(A)
    state = lobpcg_run(A, 4, iters=25, seed=5)
    for h in state.history:
        assert np.all(h.ritz_values >= w[:4] - 1e-10)


def test_determinism(tmp_path):
    p = laplacian_problem(120)
    a = lobpcg_run(p, 8, iters=15, seed=42)
    b = lobpcg_run(p, 8, iters=15, seed=42)
    for ha, hb in zip(a.history, b.history):
        assert np.array_equal(ha.ritz_values, hb.ritz_values)
        assert np.array_equal(ha.residual_norms, hb.residual_norms)
    a.write_history(tmp_path / "a.csv")
    b.write_history(tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    c = lobpcg_run(p, 8, iters=15, seed=43)
    assert not np.array_equal(a.ritz_values, c.ritz_values)


def test_history_csv(tmp_path):
    state = lobpcg_run(laplacian_problem(30), 2, iters=3, seed=1)
    path = tmp_path / "h.csv"
    state.write_history(path)
    table = read_csv(path)
    assert table.columns == ["iteration", "i", "ritz_value", "residual_norm"]
    assert len(table) == 4 * 2
    assert_allclose(table.column("ritz_value")[-2:], state.ritz_values, rtol=0)


def test_callback_sees_every_iteration():
    seen = []
    lobpcg_run(laplacian_problem(30), 2, iters=4, seed=1, callback=lambda it, d: seen.append((it, d.k)))
    assert seen == [(i, 2) for i in range(5)]


def test_breakdown_drops_directions():
    rng = np.random.default_rng(0)
    X = np.linalg.qr(rng.standard_normal((20, 3)))[0]
    W = rng.standard_normal((20, 3))
    events = []
    Q = _search_basis(X, W, X[:, :2].copy(), 4, events)
    assert Q.shape == (20, 6)
    assert events == [BreakdownRestart(iteration=4, dropped="P", rank=events[0].rank)]
    events = []
    Q = _search_basis(X, X.copy(), np.zeros((20, 0)), 5, events)
    assert Q.shape == (20, 3)
    assert [e.dropped for e in events] == ["P,W"]


def test_validation():
    with pytest.raises(ValidationError):
        lobpcg_run(np.eye(8), 3)
    with pytest.raises(ValidationError):
        lobpcg_run(np.eye(9), 3, iters=-1)


def test_laplacian_residual_history_eventually_monotone():
    state = lobpcg_run(laplacian_problem(1000), 50, iters=40, seed=7)
    r = np.array([h.residual_norms[0] for h in state.history])
    assert np.count_nonzero(np.diff(r) > 0) <= 2
    lam, x = laplacian_eigenpair(1000, 1)
    assert abs(state.ritz_values[0] - lam) < 1e-6


def test_long_run_matches_derived_ratio():
    """With enough iterations the estimated dk/sin2indiv ratio reaches Gap/gap for this spectrum."""
    n, b = 1000, 50
    ratios = {}

    def record(it, decomp):
        if it >= 150:
            reps = eigen_bounds(decomp, estimated_gaps(decomp, 0))
            if reps["sin2indiv"].applicable:
                ratios[it] = reps["dk_classical"].value / reps["sin2indiv"].value

    lobpcg_run(laplacian_problem(n), b, iters=160, seed=7, callback=record)
    assert len(ratios) == 11
    r = np.array(list(ratios.values()))
    assert np.all((r >= 1e2) & (r <= 2e3))
