"""Rayleigh-Ritz extraction and the transformed matrix.

Given an orthonormal trial basis ``Q`` the Ritz pairs come from the
eigendecomposition ``Q^T A Q = Omega diag(lam_hat) Omega^T``. Rotating to the
basis ``[Q Omega, Q_perp]`` gives the block form::

    [[diag(lam_hat), R^T],
     [R,             A3 ]]

with ``R = Q_perp^T A X_hat`` and ``A3 = Q_perp^T A Q_perp``. The columns of
``R`` have the same norms as the ambient residuals ``A x_hat_i - lam_hat_i x_hat_i``.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ComplementMissing, DimensionMismatch, IndexOutOfRange, ValidationError
from .matrix_core import (
    SymmetricProblem,
    orthogonal_complement,
    orthonormality_error,
    spectral_norm,
    symmetric_eigvals,
)

#: Ritz vector sign normalization threshold
SIGN_THRESHOLD = 1e-8


def column_signs(V):
    """Signs that make each column's first entry above ``SIGN_THRESHOLD`` positive."""
    signs = np.ones(V.shape[1])
    for j in range(V.shape[1]):
        col = V[:, j]
        big = np.flatnonzero(np.abs(col) > SIGN_THRESHOLD)
        if big.size and col[big[0]] < 0:
            signs[j] = -1.0
    return signs


@dataclass(frozen=True, eq=False)
class RitzDecomposition:
    """Output of :func:`rr_decompose`.

    Attributes
    ----------
    ritz_values : (k,) ascending Ritz values.
    ritz_vectors : (n, k) orthonormal Ritz vectors ``Q Omega``.
    residual_columns : (n, k) ambient residuals ``A x_hat_i - lam_hat_i x_hat_i``.
    residual_norms : (k,) column norms of ``residual_columns``.
    residual_total_norm : spectral norm of the residual block.
    complement, A3 : orthonormal complement ``Q_perp`` and ``Q_perp^T A Q_perp``,
        or ``None`` if not materialized.
    """

    problem: SymmetricProblem
    Q: np.ndarray
    ritz_values: np.ndarray
    ritz_vectors: np.ndarray
    residual_columns: np.ndarray
    residual_norms: np.ndarray
    residual_total_norm: float
    complement: Optional[np.ndarray] = None
    A3: Optional[np.ndarray] = None

    @property
    def n(self):
        return self.Q.shape[0]

    @property
    def k(self):
        return self.Q.shape[1]

    @property
    def has_complement(self):
        return self.complement is not None

    def require_complement(self):
        if self.complement is None:
            raise ComplementMissing("decomposition was built without the complement block")

    def check_index(self, i):
        if not 0 <= i < self.k:
            raise IndexOutOfRange(f"Ritz index {i} outside 0..{self.k - 1}")

    @property
    def R_block(self):
        """Complement-coordinate residual block ``Q_perp^T A X_hat``, shape (n-k, k)."""
        self.require_complement()
        return self.complement.T @ self.residual_columns

    def A3_eigvals(self):
        self.require_complement()
        return symmetric_eigvals(self.A3)


def rr_decompose(problem, Q, materialize_complement=False, orth_tol=1e-8):
    """Run Rayleigh-Ritz of ``problem`` on ``span(Q)``.

    Parameters
    ----------
    problem : SymmetricProblem or array_like
    Q : (n, k) array with orthonormal columns.
    materialize_complement : bool
        Also build ``Q_perp`` and ``A3``; needs dense or tridiagonal storage.
    orth_tol : float
        Reject ``Q`` if ``||Q^T Q - I||`` exceeds this.
    """
    if not isinstance(problem, SymmetricProblem):
        problem = SymmetricProblem.from_dense(problem)
    Q = np.asarray(Q, dtype=float)
    if Q.ndim == 1:
        Q = Q[:, None]
    n, k = Q.shape
    if n != problem.n:
        raise DimensionMismatch(f"basis has {n} rows, problem has n={problem.n}")
    if k < 1:
        raise ValidationError("trial basis must have at least one column")
    err = orthonormality_error(Q)
    if err > orth_tol:
        raise ValidationError(f"trial basis is not orthonormal (||Q^T Q - I|| = {err:.2e})")
    if materialize_complement and not problem.has_dense:
        problem.to_dense()  # raises OperatorOnly

    AQ = problem.apply(Q)
    H = Q.T @ AQ
    H = 0.5 * (H + H.T)
    vals, Omega = np.linalg.eigh(H)
    X = Q @ Omega
    signs = column_signs(X)
    X *= signs
    AX = AQ @ (Omega * signs)
    residuals = AX - X * vals
    norms = np.linalg.norm(residuals, axis=0)

    comp = A3 = None
    if materialize_complement:
        comp = orthogonal_complement(Q)
        A3 = comp.T @ problem.apply(comp)
        A3 = 0.5 * (A3 + A3.T)
    return RitzDecomposition(
        problem=problem,
        Q=Q,
        ritz_values=vals,
        ritz_vectors=X,
        residual_columns=residuals,
        residual_norms=norms,
        residual_total_norm=spectral_norm(residuals),
        complement=comp,
        A3=A3,
    )


def assemble_tilde(decomp):
    """Blocks ``(diag(lam_hat), R, A3)`` of the transformed matrix."""
    decomp.require_complement()
    return np.diag(decomp.ritz_values), decomp.R_block, decomp.A3


def tilde_matrix(decomp):
    """Full transformed matrix ``[X_hat, Q_perp]^T A [X_hat, Q_perp]``."""
    L, R, A3 = assemble_tilde(decomp)
    return np.block([[L, R.T], [R, A3]])


@dataclass(frozen=True)
class TildeEigsplit:
    """Coordinates of an exact eigenvector in the basis ``[x_hat_i, X_hat_rest, Q_perp]``."""

    w: float
    y: np.ndarray
    z: np.ndarray

    @property
    def sin_angle(self):
        return float(np.sqrt(self.y @ self.y + self.z @ self.z))


def eigsplit(decomp, i, exact_pair):
    """Split a unit eigenvector ``x`` into ``w``, ``y``, ``z`` relative to Ritz vector ``i``."""
    decomp.require_complement()
    decomp.check_index(i)
    _, x = exact_pair
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] != decomp.n:
        raise DimensionMismatch("eigenvector length does not match n")
    coords = decomp.ritz_vectors.T @ x
    w = float(coords[i])
    y = np.delete(coords, i)
    z = decomp.complement.T @ x
    return TildeEigsplit(w=w, y=y, z=z)


def write_decomposition(decomp, outdir, stem="decomposition"):
    """Write ``<stem>.csv`` (RITZ_VALUES, RESIDUAL_NORMS sections) and ``.npy`` arrays."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    lines = ["RITZ_VALUES", "i,value"]
    lines += [f"{i},{v:.17g}" for i, v in enumerate(decomp.ritz_values)]
    lines += ["RESIDUAL_NORMS", "i,value"]
    lines += [f"{i},{v:.17g}" for i, v in enumerate(decomp.residual_norms)]
    path = outdir / f"{stem}.csv"
    path.write_text("\n".join(lines) + "\n")
    np.save(outdir / f"{stem}_ritz_vectors.npy", decomp.ritz_vectors)
    np.save(outdir / f"{stem}_residuals.npy", decomp.residual_columns)
    return path


def read_decomposition_csv(path):
    """Parse the CSV written by :func:`write_decomposition` into ``(ritz_values, residual_norms)``."""
    sections = {}
    current = None
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line == "i,value":
            continue
        if line.isupper():
            current = sections.setdefault(line, [])
            continue
        current.append(float(line.split(",")[1]))
    return np.array(sections["RITZ_VALUES"]), np.array(sections["RESIDUAL_NORMS"])
