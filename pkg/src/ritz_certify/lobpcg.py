"""Basic block LOBPCG without preconditioning.

Each iteration runs Rayleigh-Ritz on ``span[X, W, P]`` (current block,
residuals, previous search directions) and keeps the ``block_size`` smallest
Ritz pairs. Iteration 0 is Rayleigh-Ritz on the random starting block.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import RankDeficient, ValidationError
from .matrix_core import SymmetricProblem, orthonormalize
from .rayleigh_ritz import rr_decompose
from .rng import make_rng

LOCK_TOL = 1e-13


@dataclass(frozen=True)
class BreakdownRestart:
    """Rank-deficient search space at ``iteration``; ``dropped`` names the blocks removed."""

    iteration: int
    dropped: str
    rank: int


@dataclass(frozen=True)
class HistoryEntry:
    iteration: int
    ritz_values: np.ndarray
    residual_norms: np.ndarray


@dataclass
class LobpcgState:
    iteration: int
    X: np.ndarray
    W: np.ndarray
    P: np.ndarray
    ritz_values: np.ndarray
    residual_norms: np.ndarray
    history: list = field(default_factory=list)
    events: list = field(default_factory=list)

    def write_history(self, path):
        """CSV with columns ``iteration, i, ritz_value, residual_norm`` (``i`` 0-based)."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["iteration", "i", "ritz_value", "residual_norm"])
            for h in self.history:
                for i, (v, r) in enumerate(zip(h.ritz_values, h.residual_norms)):
                    w.writerow([h.iteration, i, f"{v:.17g}", f"{r:.17g}"])


def _unit_columns(M):
    if M.shape[1] == 0:
        return M
    return M / np.linalg.norm(M, axis=0)


def _search_basis(X, W, P, iteration, events):
    """Orthonormal basis of ``span[X, W, P]``, dropping ``P`` and then ``W`` on breakdown."""
    candidates = [((X, W, P), "")]
    if P.shape[1]:
        candidates.append(((X, W), "P"))
    candidates.append(((X,), "P,W"))
    for idx, (blocks, _) in enumerate(candidates):
        try:
            return orthonormalize(np.hstack([blocks[0]] + [_unit_columns(b) for b in blocks[1:]]))
        except RankDeficient as exc:
            if idx + 1 == len(candidates):
                raise
            events.append(BreakdownRestart(iteration=iteration, dropped=candidates[idx + 1][1],
                                           rank=exc.rank))


def lobpcg_run(problem, block_size, iters=40, seed=0, callback=None):
    """Run ``iters`` LOBPCG iterations for the ``block_size`` smallest eigenpairs.

    Parameters
    ----------
    problem : SymmetricProblem
    block_size : int
        Must satisfy ``3 * block_size <= n``.
    iters : int
        Fixed number of iterations; there is no convergence stop.
    seed : int
        Seed of the standard normal starting block.
    callback : callable, optional
        ``callback(iteration, decomp)`` with the Rayleigh-Ritz decomposition
        of the kept block after every iteration (including iteration 0).

    Returns
    -------
    LobpcgState
    """
    if not isinstance(problem, SymmetricProblem):
        problem = SymmetricProblem.from_dense(problem)
    n = problem.n
    b = int(block_size)
    if b < 1 or 3 * b > n:
        raise ValidationError(f"block size must lie in 1..n/3 (n = {n}), got {block_size}")
    if iters < 0:
        raise ValidationError("iters must be nonnegative")
    rng = make_rng(seed)
    X = orthonormalize(rng.standard_normal((n, b)))
    decomp = rr_decompose(problem, X)
    state = LobpcgState(iteration=0, X=decomp.ritz_vectors, W=decomp.residual_columns,
                        P=np.zeros((n, 0)), ritz_values=decomp.ritz_values,
                        residual_norms=decomp.residual_norms)
    state.history.append(HistoryEntry(0, decomp.ritz_values.copy(), decomp.residual_norms.copy()))
    if callback is not None:
        callback(0, decomp)
    scale = problem.scale_hint
    for it in range(1, iters + 1):
        X = state.X
        active = state.residual_norms > LOCK_TOL * scale
        W = state.W[:, active]
        Q = _search_basis(X, W, state.P, it, state.events)
        big = rr_decompose(problem, Q)
        Xn = big.ritz_vectors[:, :b]
        P = Xn - X @ (X.T @ Xn)
        P = P[:, np.linalg.norm(P, axis=0) > LOCK_TOL]
        decomp = rr_decompose(problem, Xn)
        state.iteration = it
        state.X = decomp.ritz_vectors
        state.W = decomp.residual_columns
        state.P = P
        state.ritz_values = decomp.ritz_values
        state.residual_norms = decomp.residual_norms
        state.history.append(HistoryEntry(it, decomp.ritz_values.copy(),
                                          decomp.residual_norms.copy()))
        if callback is not None:
            callback(it, decomp)
    return state
