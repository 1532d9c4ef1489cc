"""Bounds for the angle between a block of Ritz vectors and an exact invariant subspace.

The target block holds ``k1`` Ritz pairs; the remaining ``k - k1`` pairs
(``R_2``, ``Lambda_hat_2``) and the complement block ``A3`` enter through the
redefined gaps

* ``gap = min |lambda(Lambda_1) - lambda(Lambda_hat_2)|``
* ``Gap = min |lambda(Lambda_1) - lambda(A3)|``.

Frobenius-flavor bounds hold whenever the gaps are positive. The spectral
and generic unitarily-invariant flavors additionally require the two spectra
in each Sylvester equation to be separated by an interval, unless one side is
a single eigenvalue; otherwise they are reported as inapplicable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .bounds_eigen import BoundReport, _check_gap, _inapplicable, _ratio, dk_classical
from .errors import NonpositivePairDistance, ValidationError
from .gap_model import ESTIMATED, EXACT
from .matrix_core import (
    SymmetricProblem,
    frobenius_norm,
    orthogonal_complement,
    spectral_norm,
    symmetric_eig,
)
from .rayleigh_ritz import rr_decompose

NORMS = ("spectral", "frobenius", "unitarily_invariant")


def interval_separated(a, b):
    """True if one set lies in an interval containing none of the other set.

    Sets with at most one element count as separated.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size <= 1 or b.size <= 1:
        return True

    def outside(inner, outer):
        return not np.any((outer >= inner.min()) & (outer <= inner.max()))

    return outside(a, b) or outside(b, a)


@dataclass(frozen=True)
class SubspaceBoundInputs:
    """Norms and gaps consumed by the subspace bounds.

    ``R_norm``, ``R1_norm`` are ``(spectral, frobenius)`` pairs; ``r_norms`` and
    ``pair_dists`` run over the non-target pairs. ``separated_A3`` and
    ``separated_L2`` record interval separation of ``Lambda_1`` from
    ``lambda(A3)`` and from ``Lambda_hat_2``.
    """

    k1: int
    R_norm: tuple
    R1_norm: tuple
    R2_norm: float
    r_norms: np.ndarray
    gap: float
    Gap: float
    pair_dists: np.ndarray
    separated_A3: bool = True
    separated_L2: bool = True
    mode: str = EXACT

    def with_norms_of(self, norm):
        idx = 1 if norm == "frobenius" else 0
        return self.R_norm[idx], self.R1_norm[idx]


def subspace_inputs(decomp, k1, oracle_eigs=None, target=None, eig_indices=None, mode=EXACT):
    """Assemble :class:`SubspaceBoundInputs` from a decomposition.

    Parameters
    ----------
    decomp : RitzDecomposition (complement needed in exact mode).
    k1 : int
        Number of target Ritz pairs.
    oracle_eigs : array_like, optional
        Exact eigenvalues of ``A`` (ascending); required in exact mode.
    target : sequence of int, optional
        Ritz indices of the target block; defaults to the ``k1`` smallest.
    eig_indices : sequence of int, optional
        Exact eigenvalues paired with the target; defaults to the ``k1`` smallest.
    mode : ``"exact"`` or ``"estimated"``
        Estimated mode replaces ``Lambda_1`` by the target Ritz values and
        ``lambda(A3)`` by the largest Ritz value.
    """
    k = decomp.k
    if not 1 <= k1 <= k:
        raise ValidationError(f"k1 must lie in 1..{k}, got {k1}")
    target = np.arange(k1) if target is None else np.asarray(target, dtype=int)
    if target.size != k1 or len(set(target.tolist())) != k1 or target.min() < 0 or target.max() >= k:
        raise ValidationError("target must list k1 distinct Ritz indices")
    rest = np.setdiff1d(np.arange(k), target)
    vals = decomp.ritz_values
    if mode == EXACT:
        if oracle_eigs is None:
            raise ValidationError("exact mode needs oracle eigenvalues")
        decomp.require_complement()
        eigs = np.asarray(oracle_eigs, dtype=float)
        idx = np.arange(k1) if eig_indices is None else np.asarray(eig_indices, dtype=int)
        L1 = eigs[idx]
        outer = decomp.A3_eigvals()
    elif mode == ESTIMATED:
        if rest.size == 0:
            raise ValidationError("estimated mode needs k1 < k")
        L1 = vals[target]
        outer = vals[-1:]
    else:
        raise ValidationError(f"unknown mode {mode!r}")
    L2 = vals[rest]
    Rcols = decomp.residual_columns
    R1 = Rcols[:, target]
    R2 = Rcols[:, rest]
    Rt = Rcols[:, np.concatenate([target, rest])]
    if rest.size:
        dists = np.abs(L1[None, :] - L2[:, None]).min(axis=1)
    else:
        dists = np.zeros(0)
    gap = float(dists.min()) if dists.size else math.inf
    Gap = float(np.abs(L1[None, :] - outer[:, None]).min()) if outer.size else math.inf
    return SubspaceBoundInputs(
        k1=k1,
        R_norm=(spectral_norm(Rt), frobenius_norm(Rt)),
        R1_norm=(spectral_norm(R1), frobenius_norm(R1)),
        R2_norm=spectral_norm(R2),
        r_norms=decomp.residual_norms[rest],
        gap=gap,
        Gap=Gap,
        pair_dists=dists,
        separated_A3=interval_separated(L1, outer),
        separated_L2=interval_separated(L1, L2),
        mode=mode,
    )


def _factor(b, norm):
    return 1.0 + b if norm == "unitarily_invariant" else math.hypot(1.0, b)


def _norm_ok(norm, *separations):
    if norm not in NORMS:
        raise ValidationError(f"unknown norm {norm!r}")
    return norm == "frobenius" or all(separations)


def _finish(rep, inp, norm):
    return replace(rep, norm=norm, certified=inp.mode == EXACT,
                   extras={**rep.extras, "k1": inp.k1})


def subspace_boundvec(inp, norm="spectral"):
    """``(||R|| / Gap) * f(||R2|| / gap)`` with ``f(b) = sqrt(1 + b^2)`` or ``1 + b``."""
    G = _check_gap(inp.Gap, "Gap")
    g = _check_gap(inp.gap, "gap")
    R, _ = inp.with_norms_of(norm)
    b = _ratio(inp.R2_norm, g)
    inputs = {"R": R, "R2": inp.R2_norm, "gap": g, "Gap": G}
    if not _norm_ok(norm, inp.separated_A3, inp.separated_L2):
        return _finish(_inapplicable("subspace_boundvec", math.nan, inputs), inp, norm)
    rep = BoundReport(name="subspace_boundvec", value=_ratio(R, G) * _factor(b, norm),
                      inputs=inputs, extras={"prefix": _ratio(R, G), "b": b})
    return _finish(rep, inp, norm)


def subspace_sin22(inp, norm="spectral"):
    """``||R1|| / (Gap - ||R2||^2/gap) * f(||R2|| / gap)``; needs ``Gap > ||R2||^2/gap``."""
    G = _check_gap(inp.Gap, "Gap")
    g = _check_gap(inp.gap, "gap")
    _, R1 = inp.with_norms_of(norm)
    b = _ratio(inp.R2_norm, g)
    slack = G - inp.R2_norm * b
    inputs = {"R1": R1, "R2": inp.R2_norm, "gap": g, "Gap": G}
    if not slack > 0 or not _norm_ok(norm, inp.separated_A3, inp.separated_L2):
        return _finish(_inapplicable("subspace_sin22", slack, inputs, {"b": b}), inp, norm)
    prefix = _ratio(R1, slack)
    rep = BoundReport(name="subspace_sin22", value=prefix * _factor(b, norm), slack=slack,
                      inputs=inputs, extras={"prefix": prefix, "b": b})
    return _finish(rep, inp, norm)


def subspace_sin2indiv(inp, norm="spectral"):
    """Individual-residual subspace bound; needs ``Gap > sum ||r_i||^2 / dist_i``."""
    G = _check_gap(inp.Gap, "Gap")
    d = np.asarray(inp.pair_dists, dtype=float)
    if np.any(~(d > 0)):
        raise NonpositivePairDistance("pair distances must be positive")
    r = np.asarray(inp.r_norms, dtype=float)
    _, R1 = inp.with_norms_of(norm)
    S2 = float(np.sum(r ** 2 / d))
    S1 = float(np.sum(r / d))
    slack = G - S2
    inputs = {"R1": R1, "Gap": G, "S1": S1, "S2": S2}
    if not slack > 0 or not _norm_ok(norm, inp.separated_A3):
        return _finish(_inapplicable("subspace_sin2indiv", slack, inputs, {"b": S1}), inp, norm)
    prefix = _ratio(R1, slack)
    rep = BoundReport(name="subspace_sin2indiv", value=prefix * _factor(S1, norm), slack=slack,
                      inputs=inputs, extras={"prefix": prefix, "b": S1})
    return _finish(rep, inp, norm)


def subspace_bounds(inp):
    """Every family in every norm flavor, keyed by ``(name, norm)``."""
    out = {}
    if not (inp.gap > 0 and inp.Gap > 0):
        return out
    for fn in (subspace_boundvec, subspace_sin22, subspace_sin2indiv):
        for norm in NORMS:
            if fn is subspace_sin2indiv and inp.pair_dists.size and not np.all(inp.pair_dists > 0):
                continue
            rep = fn(inp, norm)
            out[(rep.name, norm)] = rep
    return out


def dk_recovery(problem, pair, oracle=None, eig_index=None):
    """Classical bound for ``(lam_hat, x_hat)`` rederived through the subspace theorem.

    Rayleigh-Ritz is run on the complement of ``x_hat`` (``k1 = k = n - 1``)
    and paired with all exact eigenvalues except the one ``x_hat`` approximates,
    so ``Gap`` becomes the classical ``gap_c`` and ``||R|| = ||r||``.
    ``lam_hat`` should be the Rayleigh quotient of ``x_hat``.
    """
    if not isinstance(problem, SymmetricProblem):
        problem = SymmetricProblem.from_dense(problem)
    lam_hat, x_hat = pair
    x_hat = np.asarray(x_hat, dtype=float).reshape(-1, 1)
    x_hat = x_hat / np.linalg.norm(x_hat)
    if oracle is None:
        oracle = symmetric_eig(problem)
    eigs = np.asarray(oracle[0], dtype=float)
    j = int(np.argmin(np.abs(eigs - lam_hat))) if eig_index is None else int(eig_index)
    Qc = orthogonal_complement(x_hat)
    decomp = rr_decompose(problem, Qc, materialize_complement=True)
    inp = subspace_inputs(decomp, decomp.k, eigs, eig_indices=np.delete(np.arange(eigs.size), j))
    rep = subspace_boundvec(inp, "spectral")
    r = np.linalg.norm(problem.apply(x_hat[:, 0]) - lam_hat * x_hat[:, 0])
    gap_c = float(np.min(np.abs(np.delete(eigs, j) - lam_hat)))
    classical = dk_classical(r, gap_c)
    return replace(rep, name="dk_recovery",
                   extras={**rep.extras, "dk_classical": classical.value, "gap_c": gap_c})
