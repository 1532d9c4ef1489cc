"""Big and small gaps for a target Ritz pair.

``gap_i`` is the distance from the target eigenvalue to the other Ritz values
and ``Gap_i`` the distance to the spectrum of the complement block ``A3``.
In exact mode the target eigenvalue is the oracle ``lambda_i``; in estimated
mode it is replaced by the Ritz value and ``Gap_i`` by a Ritz-value proxy.
A missing set (``k == 1`` or ``k == n``) yields ``+inf``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import IndexOutOfRange, TooFewRitzPairs, ValidationError

EXACT = "exact"
ESTIMATED = "estimated"


def _min_dist(value, others):
    others = np.asarray(others, dtype=float)
    if others.size == 0:
        return np.inf
    return float(np.min(np.abs(value - others)))


@dataclass(frozen=True)
class GapData:
    """Gap quantities for Ritz pair ``target_index``.

    ``pair_dists[j]`` is the distance from the target eigenvalue to Ritz value
    ``other_indices[j]``. ``gap_c`` is ``None`` unless an oracle was supplied.
    """

    mode: str
    target_index: int
    target_value: float
    gap: float
    Gap: float
    pair_dists: np.ndarray
    other_indices: np.ndarray
    gap_c: Optional[float] = None

    @property
    def certified(self):
        return self.mode == EXACT


def exact_gaps(decomp, i, oracle_eigs, eig_index=None):
    """Gaps using oracle eigenvalues.

    Parameters
    ----------
    decomp : RitzDecomposition with the complement materialized.
    i : int
        Target Ritz index (0-based, ascending order).
    oracle_eigs : array_like
        All eigenvalues of ``A``, ascending.
    eig_index : int, optional
        Which exact eigenvalue is approximated by Ritz value ``i``. Defaults to
        ``i`` (smallest eigenvalues paired with smallest Ritz values).
    """
    decomp.require_complement()
    decomp.check_index(i)
    eigs = np.asarray(oracle_eigs, dtype=float)
    if eigs.shape != (decomp.n,):
        raise ValidationError(f"expected {decomp.n} oracle eigenvalues, got {eigs.shape}")
    j = i if eig_index is None else int(eig_index)
    if not 0 <= j < eigs.size:
        raise IndexOutOfRange(f"eigenvalue index {j} outside 0..{eigs.size - 1}")
    lam = float(eigs[j])
    others = np.delete(np.arange(decomp.k), i)
    dists = np.abs(lam - decomp.ritz_values[others])
    return GapData(
        mode=EXACT,
        target_index=i,
        target_value=lam,
        gap=float(dists.min()) if dists.size else np.inf,
        Gap=_min_dist(lam, decomp.A3_eigvals()),
        pair_dists=dists,
        other_indices=others,
        gap_c=_min_dist(decomp.ritz_values[i], np.delete(eigs, j)),
    )


def estimated_gaps(decomp, i, proxy="last", next_ritz=None):
    """Gaps from Ritz values only.

    ``gap_i`` is ``min_{j != i} |lam_hat_i - lam_hat_j|``. For ``Gap_i`` the
    default ``proxy="last"`` uses ``|lam_hat_i - lam_hat_k|``; ``proxy="next"``
    uses ``|lam_hat_i - next_ritz|`` for a caller-supplied estimate of the
    first eigenvalue not approximated by the trial space.
    """
    values = decomp.ritz_values if hasattr(decomp, "ritz_values") else np.asarray(decomp, float)
    k = values.size
    if k < 2:
        raise TooFewRitzPairs("estimated gaps need at least two Ritz pairs")
    if not 0 <= i < k:
        raise IndexOutOfRange(f"Ritz index {i} outside 0..{k - 1}")
    lam = float(values[i])
    others = np.delete(np.arange(k), i)
    dists = np.abs(lam - values[others])
    if proxy == "last":
        Gap = abs(lam - float(values[-1]))
    elif proxy == "next":
        if next_ritz is None:
            raise ValidationError("proxy='next' needs next_ritz")
        Gap = abs(lam - float(next_ritz))
    else:
        raise ValidationError(f"unknown Gap proxy {proxy!r}")
    return GapData(
        mode=ESTIMATED,
        target_index=i,
        target_value=lam,
        gap=float(dists.min()),
        Gap=Gap,
        pair_dists=dists,
        other_indices=others,
    )
