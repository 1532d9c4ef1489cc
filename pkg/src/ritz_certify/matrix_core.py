"""Dense numerical primitives for desk-scale symmetric problems.

Everything here works on plain ``numpy`` arrays. An orthonormal basis is an
``(n, k)`` array with orthonormal columns; :func:`orthonormality_error`
measures how far a candidate is from that.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatch,
    DimensionTooLarge,
    OperatorOnly,
    RankDeficient,
    ValidationError,
)

#: unit roundoff of IEEE double precision
UNIT_ROUNDOFF = 2.0 ** -53

DEFAULT_MAX_N = 4096


def max_dense_n():
    """Largest dimension accepted by the dense kernels (env ``RITZ_MAX_N``)."""
    value = os.environ.get("RITZ_MAX_N")
    if value is None:
        return DEFAULT_MAX_N
    try:
        return int(value)
    except ValueError as exc:
        raise ValidationError(f"RITZ_MAX_N must be an integer, got {value!r}") from exc


def _check_size(*dims):
    limit = max_dense_n()
    if max(dims) > limit:
        raise DimensionTooLarge(
            f"dimension {max(dims)} exceeds dense limit {limit} (set RITZ_MAX_N)")


@dataclass(frozen=True, eq=False)
class SymmetricProblem:
    """A real symmetric matrix given densely, as a tridiagonal, or as a matvec.

    Use the ``from_*`` constructors rather than the raw initializer.
    """

    n: int
    dense: Optional[np.ndarray] = None
    diag: Optional[np.ndarray] = None
    offdiag: Optional[np.ndarray] = None
    operator: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, repr=False)
    scale_hint: float = 1.0

    @classmethod
    def from_dense(cls, A, scale_hint=None, check=True):
        A = np.array(A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DimensionMismatch(f"expected a square matrix, got shape {A.shape}")
        if scale_hint is None:
            scale_hint = max(float(np.max(np.abs(A), initial=0.0)), 1.0)
        if check:
            asym = float(np.max(np.abs(A - A.T), initial=0.0))
            if asym > 1e-14 * scale_hint:
                raise ValidationError(f"matrix is not symmetric (max |A - A^T| = {asym:.3e})")
        A = 0.5 * (A + A.T)
        A.setflags(write=False)
        return cls(n=A.shape[0], dense=A, scale_hint=float(scale_hint))

    @classmethod
    def from_tridiagonal(cls, diag, offdiag, scale_hint=None):
        d = np.array(diag, dtype=float)
        e = np.array(offdiag, dtype=float)
        if d.ndim != 1 or e.shape != (max(d.size - 1, 0),):
            raise DimensionMismatch("offdiag must have length len(diag) - 1")
        if scale_hint is None:
            scale_hint = max(float(np.max(np.abs(d), initial=0.0))
                             + 2.0 * float(np.max(np.abs(e), initial=0.0)), 1.0)
        d.setflags(write=False)
        e.setflags(write=False)
        return cls(n=d.size, diag=d, offdiag=e, scale_hint=float(scale_hint))

    @classmethod
    def from_operator(cls, matvec, n, scale_hint=1.0):
        """Wrap ``matvec``, which must accept ``(n,)`` and ``(n, m)`` arrays."""
        return cls(n=int(n), operator=matvec, scale_hint=float(scale_hint))

    @property
    def kind(self):
        if self.dense is not None:
            return "dense"
        if self.diag is not None:
            return "tridiagonal"
        return "operator"

    @property
    def has_dense(self):
        return self.kind != "operator"

    def apply(self, V):
        V = np.asarray(V, dtype=float)
        if V.shape[0] != self.n:
            raise DimensionMismatch(f"operand has {V.shape[0]} rows, problem has n={self.n}")
        if self.dense is not None:
            return self.dense @ V
        if self.diag is not None:
            out = self.diag.reshape((-1,) + (1,) * (V.ndim - 1)) * V
            if self.n > 1:
                e = self.offdiag.reshape((-1,) + (1,) * (V.ndim - 1))
                out[:-1] += e * V[1:]
                out[1:] += e * V[:-1]
            return out
        return np.asarray(self.operator(V), dtype=float)

    def to_dense(self):
        if self.dense is not None:
            return self.dense
        if self.diag is not None:
            _check_size(self.n)
            return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)
        raise OperatorOnly("problem is given only as an operator")

    def symmetry_defect(self, rng=None, probes=3):
        """Largest relative ``|<u, Av> - <Au, v>|`` over random probe pairs."""
        rng = np.random.default_rng(0) if rng is None else rng
        worst = 0.0
        for _ in range(probes):
            u = rng.standard_normal(self.n)
            v = rng.standard_normal(self.n)
            diff = abs(u @ self.apply(v) - self.apply(u) @ v)
            worst = max(worst, diff / (self.scale_hint * np.linalg.norm(u) * np.linalg.norm(v)))
        return worst


def symmetric_eig(problem):
    """Eigenvalues (ascending) and orthonormal eigenvectors of a symmetric problem."""
    if not isinstance(problem, SymmetricProblem):
        problem = SymmetricProblem.from_dense(problem)
    _check_size(problem.n)
    if problem.kind == "operator":
        raise OperatorOnly("symmetric_eig needs dense or tridiagonal storage")
    if problem.kind == "tridiagonal":
        if problem.n == 1:
            return problem.diag.copy(), np.ones((1, 1))
        return scipy.linalg.eigh_tridiagonal(problem.diag, problem.offdiag)
    return scipy.linalg.eigh(problem.dense)


def symmetric_eigvals(A):
    """Eigenvalues (ascending) of a small dense symmetric array; empty-safe."""
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return np.zeros(0)
    return scipy.linalg.eigvalsh(A)


def full_svd(M, full_matrices=False):
    """SVD ``M = U diag(s) V^T`` with ``s`` descending. Returns ``(U, s, V)``."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d array, got shape {M.shape}")
    _check_size(*M.shape)
    U, s, Vt = np.linalg.svd(M, full_matrices=full_matrices)
    return U, s, Vt.T


def spectral_norm(M):
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return 0.0
    if M.ndim == 1 or min(M.shape) == 1:
        return float(np.linalg.norm(M))
    return float(np.linalg.norm(M, 2))


def frobenius_norm(M):
    M = np.asarray(M, dtype=float)
    return float(np.linalg.norm(M)) if M.size else 0.0


def orthonormality_error(Q):
    """Spectral norm of ``Q^T Q - I``."""
    Q = np.asarray(Q, dtype=float)
    return spectral_norm(Q.T @ Q - np.eye(Q.shape[1]))


def orthonormalize(columns, rank_tol=1e-10):
    """Orthonormal basis for the column span via Householder QR.

    Raises :class:`RankDeficient` if the smallest singular value is below
    ``rank_tol`` times the largest. The sign of each column is chosen so the
    triangular factor has a positive diagonal.
    """
    C = np.asarray(columns, dtype=float)
    if C.ndim == 1:
        C = C[:, None]
    n, k = C.shape
    if k > n:
        raise RankDeficient(f"{k} columns in dimension {n}", rank=n)
    s = np.linalg.svd(C, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        raise RankDeficient("all columns are zero", rank=0)
    rank = int(np.sum(s > rank_tol * s[0]))
    if rank < k:
        raise RankDeficient(f"numerical rank {rank} < {k} columns", rank=rank)
    Q, R = np.linalg.qr(C)
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    return Q * signs


def orthogonal_complement(Q):
    """Orthonormal basis for the complement of ``span(Q)``, shape ``(n, n-k)``."""
    Q = np.asarray(Q, dtype=float)
    n, k = Q.shape
    _check_size(n)
    full, _ = np.linalg.qr(Q, mode="complete")
    return full[:, k:]


@dataclass(frozen=True)
class PrincipalAngles:
    """Sines of the principal angles, sorted nonincreasing."""

    sines: np.ndarray

    @property
    def spectral_sin(self):
        return float(self.sines[0]) if self.sines.size else 0.0

    @property
    def frobenius_sin(self):
        return float(np.linalg.norm(self.sines))

    @property
    def angles(self):
        return np.arcsin(self.sines)

    def norm(self, which="spectral"):
        if which == "spectral":
            return self.spectral_sin
        if which == "frobenius":
            return self.frobenius_sin
        raise ValidationError(f"unknown norm {which!r}")


def principal_angles(X, Y):
    """Principal angles between ``span(X)`` (k1 columns) and ``span(Y)`` (k2 >= k1).

    The sines are the singular values of ``(I - Y Y^T) X``, i.e. of
    ``Y_perp^T X`` without forming ``Y_perp``; this keeps small angles accurate.
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if Y.ndim == 1:
        Y = Y[:, None]
    if X.shape[0] != Y.shape[0]:
        raise DimensionMismatch(f"ambient dimensions differ: {X.shape[0]} vs {Y.shape[0]}")
    if X.shape[1] > Y.shape[1]:
        raise DimensionMismatch(
            f"first basis has {X.shape[1]} columns, more than the second ({Y.shape[1]})")
    P = X - Y @ (Y.T @ X)
    if P.shape[1] == 1:
        sines = np.array([np.linalg.norm(P)])
    else:
        sines = np.linalg.svd(P, compute_uv=False)
    sines = np.clip(np.sort(sines)[::-1], 0.0, 1.0)
    return PrincipalAngles(sines=sines)
