"""Petrov-Galerkin projection SVD and bounds for leading singular subspaces.

For trial bases ``U`` (``k_m`` columns) and ``V`` (``k_n`` columns) the small
matrix ``U^T M V`` is diagonalized and the trial bases rotated accordingly.
Completing both to square orthogonal matrices puts ``M`` in the block form::

    [[Sig1, 0,    R1],
     [0,    Sig2, R2],
     [S1,   S2,   A3]]

where ``Sig1`` holds the ``k1`` leading Ritz singular values and ``Sig2`` the
remaining ones (zero padded when ``k_m != k_n``).

The bounds control ``Theta = max(sin angle(U1, U1_hat), sin angle(V1, V1_hat))``
using ``Gap = sigma_min(Sigma_1) - ||A3||`` and
``gap = sigma_min(Sigma_1) - ||Sig2||`` with exact leading singular values
``Sigma_1``. In estimated mode ``sigma_min(Sigma_1)`` is replaced by the
smallest kept Ritz singular value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .bounds_eigen import BoundReport, _check_gap, _inapplicable, _ratio
from .errors import DimensionMismatch, NonpositivePairDistance, ValidationError
from .gap_model import ESTIMATED, EXACT
from .matrix_core import (
    frobenius_norm,
    full_svd,
    orthogonal_complement,
    orthonormality_error,
    orthonormalize,
    principal_angles,
    spectral_norm,
)

NORMS = ("spectral", "frobenius", "unitarily_invariant")


@dataclass(frozen=True, eq=False)
class SvdProjection:
    """Block decomposition of ``M`` relative to rotated trial bases.

    If the input had fewer rows than columns everything here refers to the
    transpose and ``transposed`` is set; the bounds are unaffected since they
    are symmetric in the two sides.
    """

    m: int
    n: int
    k_m: int
    k_n: int
    k1: int
    sigma_hat: np.ndarray
    U_hat: np.ndarray
    V_hat: np.ndarray
    Sigma2: np.ndarray
    R1: np.ndarray
    R2: np.ndarray
    S1: np.ndarray
    S2: np.ndarray
    A3: np.ndarray
    A3_norm: float
    U_perp: np.ndarray
    V_perp: np.ndarray
    transposed: bool = False

    @property
    def U1(self):
        return self.U_hat[:, :self.k1]

    @property
    def V1(self):
        return self.V_hat[:, :self.k1]

    @property
    def R(self):
        return np.vstack([self.R1, self.R2])

    @property
    def S(self):
        return np.hstack([self.S1, self.S2])

    def tilde_matrix(self):
        """The full block matrix ``[U_hat, U_perp]^T M [V_hat, V_perp]``."""
        core = np.zeros((self.k_m, self.k_n))
        p = min(self.k_m, self.k_n)
        core[np.arange(p), np.arange(p)] = self.sigma_hat[:p]
        top = np.hstack([core, self.R])
        bottom = np.hstack([self.S, self.A3])
        return np.vstack([top, bottom])

    def padded_sigma2(self, count):
        """``sigma_hat[k1 + i]`` for ``i < count``, zero beyond ``min(k_m, k_n)``."""
        out = np.zeros(count)
        avail = self.sigma_hat[self.k1:min(self.k_m, self.k_n)]
        out[:min(count, avail.size)] = avail[:count]
        return out


def _trial(B, rows, name):
    B = np.asarray(B, dtype=float)
    if B.ndim == 1:
        B = B[:, None]
    if B.shape[0] != rows:
        raise DimensionMismatch(f"{name} has {B.shape[0]} rows, expected {rows}")
    if orthonormality_error(B) > 1e-12:
        B = orthonormalize(B)
    return B


def project_svd(M, U_trial, V_trial, k1):
    """Project ``M`` onto ``span(U_trial) x span(V_trial)`` and assemble the blocks."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise DimensionMismatch("M must be a 2-d array")
    transposed = M.shape[0] < M.shape[1]
    if transposed:
        M, U_trial, V_trial = M.T, V_trial, U_trial
    m, n = M.shape
    U = _trial(U_trial, m, "U_trial")
    V = _trial(V_trial, n, "V_trial")
    k_m, k_n = U.shape[1], V.shape[1]
    if not 1 <= k1 <= min(k_m, k_n):
        raise ValidationError(f"k1 must lie in 1..{min(k_m, k_n)}, got {k1}")
    Ut, sig, Vt = full_svd(U.T @ M @ V, full_matrices=True)
    U_hat = U @ Ut
    V_hat = V @ Vt
    U3 = orthogonal_complement(U)
    V3 = orthogonal_complement(V)
    MV3 = M @ V3
    U3M = U3.T @ M
    A3 = U3M @ V3
    R = U_hat.T @ MV3
    S = U3M @ V_hat
    Sigma2 = U_hat[:, k1:].T @ M @ V_hat[:, k1:]
    return SvdProjection(
        m=m, n=n, k_m=k_m, k_n=k_n, k1=k1,
        sigma_hat=sig, U_hat=U_hat, V_hat=V_hat, Sigma2=Sigma2,
        R1=R[:k1], R2=R[k1:], S1=S[:, :k1], S2=S[:, k1:],
        A3=A3, A3_norm=spectral_norm(A3), U_perp=U3, V_perp=V3,
        transposed=transposed,
    )


@dataclass(frozen=True)
class SvdGapData:
    """Gaps for the SVD bounds.

    ``Gap_stated`` is ``min(sigma(Sig1_hat)) - max(sigma(A3))``, a diagnostic
    only; the bounds use ``Gap``.
    """

    sigma_min: float
    Gap: float
    gap: float
    pair_dists: np.ndarray
    Gap_stated: float
    mode: str = EXACT


def svd_gaps(proj, oracle_singulars=None, mode=EXACT):
    """Gaps from the exact leading singular values (exact) or from ``sigma_hat`` (estimated)."""
    if mode == EXACT:
        if oracle_singulars is None:
            raise ValidationError("exact mode needs the oracle singular values")
        s = np.sort(np.asarray(oracle_singulars, dtype=float))[::-1]
        smin = float(s[proj.k1 - 1])
    elif mode == ESTIMATED:
        smin = float(proj.sigma_hat[proj.k1 - 1])
    else:
        raise ValidationError(f"unknown mode {mode!r}")
    kp = max(proj.k_m, proj.k_n) - proj.k1
    sig2 = proj.padded_sigma2(kp)
    a3_max = proj.A3_norm
    return SvdGapData(
        sigma_min=smin,
        Gap=smin - a3_max,
        gap=smin - spectral_norm(proj.Sigma2),
        pair_dists=smin - sig2,
        Gap_stated=float(proj.sigma_hat[proj.k1 - 1]) - a3_max,
        mode=mode,
    )


def _nrm(X, norm):
    return frobenius_norm(X) if norm == "frobenius" else spectral_norm(X)


def _factor(b, norm):
    return 1.0 + b if norm == "unitarily_invariant" else math.hypot(1.0, b)


def _finish(rep, proj, gaps, norm):
    return replace(rep, norm=norm, certified=gaps.mode == EXACT,
                   extras={**rep.extras, "k_m": proj.k_m, "k_n": proj.k_n, "k1": proj.k1})


def _gaps_ok(gaps):
    return _check_gap(gaps.Gap, "Gap"), _check_gap(gaps.gap, "gap")


def svd_boundvec(proj, gaps, norm="spectral"):
    """``max(||R||, ||S||) / Gap * f(max(||R2||, ||S2||) / gap)``."""
    if norm not in NORMS:
        raise ValidationError(f"unknown norm {norm!r}")
    G, g = _gaps_ok(gaps)
    top = max(_nrm(proj.R, norm), _nrm(proj.S, norm))
    c2 = max(spectral_norm(proj.R2), spectral_norm(proj.S2))
    b = _ratio(c2, g)
    rep = BoundReport(name="svd_boundvec", value=_ratio(top, G) * _factor(b, norm),
                      inputs={"RS": top, "RS2": c2, "gap": g, "Gap": G},
                      extras={"prefix": _ratio(top, G), "b": b})
    return _finish(rep, proj, gaps, norm)


def svd_sin22(proj, gaps, norm="spectral"):
    """Refined bound; needs ``Gap > max(||S2||, ||R2||)^2 / gap``."""
    if norm not in NORMS:
        raise ValidationError(f"unknown norm {norm!r}")
    G, g = _gaps_ok(gaps)
    top = max(_nrm(proj.R1, norm), _nrm(proj.S1, norm))
    c2 = max(spectral_norm(proj.R2), spectral_norm(proj.S2))
    b = _ratio(c2, g)
    slack = G - c2 * b
    inputs = {"RS1": top, "RS2": c2, "gap": g, "Gap": G}
    if not slack > 0:
        return _finish(_inapplicable("svd_sin22", slack, inputs, {"b": b}), proj, gaps, norm)
    prefix = _ratio(top, slack)
    rep = BoundReport(name="svd_sin22", value=prefix * _factor(b, norm), slack=slack,
                      inputs=inputs, extras={"prefix": prefix, "b": b})
    return _finish(rep, proj, gaps, norm)


def _pair_norms(proj):
    """``max(||r_2i||, ||s_2i||)`` for ``i < k'``, zero padded on the shorter side."""
    kp = max(proj.k_m, proj.k_n) - proj.k1
    r = np.zeros(kp)
    s = np.zeros(kp)
    rn = np.linalg.norm(proj.R2, axis=1) if proj.R2.size else np.zeros(proj.R2.shape[0])
    sn = np.linalg.norm(proj.S2, axis=0) if proj.S2.size else np.zeros(proj.S2.shape[1])
    r[:rn.size] = rn
    s[:sn.size] = sn
    return np.maximum(r, s)


def svd_sin2indiv(proj, gaps, norm="spectral"):
    """Individual-residual bound; needs ``Gap > sum c_i^2 / (sigma_min - sigma_hat_{k1+i})``."""
    if norm not in NORMS:
        raise ValidationError(f"unknown norm {norm!r}")
    G = _check_gap(gaps.Gap, "Gap")
    d = np.asarray(gaps.pair_dists, dtype=float)
    if np.any(~(d > 0)):
        raise NonpositivePairDistance("sigma_min - sigma_hat must be positive")
    c = _pair_norms(proj)
    top = max(_nrm(proj.R1, norm), _nrm(proj.S1, norm))
    S2 = float(np.sum(c ** 2 / d))
    S1 = float(np.sum(c / d))
    slack = G - S2
    inputs = {"RS1": top, "Gap": G, "S1": S1, "S2": S2}
    if not slack > 0:
        return _finish(_inapplicable("svd_sin2indiv", slack, inputs, {"b": S1}), proj, gaps, norm)
    prefix = _ratio(top, slack)
    rep = BoundReport(name="svd_sin2indiv", value=prefix * _factor(S1, norm), slack=slack,
                      inputs=inputs, extras={"prefix": prefix, "b": S1})
    return _finish(rep, proj, gaps, norm)


def svd_bounds(proj, gaps):
    """All three families in every norm flavor, keyed by ``(name, norm)``."""
    out = {}
    if not (gaps.Gap > 0 and gaps.gap > 0):
        return out
    for fn in (svd_boundvec, svd_sin22, svd_sin2indiv):
        for norm in NORMS:
            rep = fn(proj, gaps, norm)
            out[(rep.name, norm)] = rep
    return out


@dataclass(frozen=True)
class SvdOracle:
    singulars: np.ndarray
    theta_spectral: float
    theta_frobenius: float


def svd_oracle(M, proj, full=None):
    """Exact ``Theta`` in both norms from a full SVD of ``M``."""
    M = np.asarray(M, dtype=float)
    if proj.transposed:
        M = M.T
    U, s, V = full_svd(M) if full is None else full
    k1 = proj.k1
    pu = principal_angles(U[:, :k1], proj.U1)
    pv = principal_angles(V[:, :k1], proj.V1)
    return SvdOracle(singulars=s,
                     theta_spectral=max(pu.spectral_sin, pv.spectral_sin),
                     theta_frobenius=max(pu.frobenius_sin, pv.frobenius_sin))
