"""Error bounds for a single Ritz vector.

All functions take scalar norms and gaps and return a :class:`BoundReport`.
A bound whose denominator hypothesis fails is reported with
``applicable=False`` and ``value=inf`` instead of raising, so sweeps over
many iterations can keep going.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import NonpositiveGap, NonpositivePairDistance, ValidationError
from .gap_model import EXACT, _min_dist
from .matrix_core import UNIT_ROUNDOFF, spectral_norm, symmetric_eigvals

DEFAULT_C_ROUND = 10.0


@dataclass(frozen=True)
class BoundReport:
    """A bound value together with the facts needed to interpret it.

    Attributes
    ----------
    name : bound family, e.g. ``"sin2indiv"``.
    value : bound on ``sin`` of the angle; ``inf`` when inapplicable.
    applicable : whether the hypotheses of the underlying theorem hold.
    slack : margin by which the hypothesis holds (``nan`` if there is none).
    norm : ``"spectral"``, ``"frobenius"`` or ``"unitarily_invariant"``.
    certified : exact-mode inputs and a true bound (not an estimate).
    inputs : scalars the value was computed from.
    extras : bound-specific by-products (factors, argmin, ...).
    """

    name: str
    value: float
    applicable: bool = True
    slack: float = math.nan
    norm: str = "spectral"
    certified: bool = True
    inputs: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    def with_mode(self, mode):
        return replace(self, certified=self.certified and mode == EXACT)


def _check_gap(value, name="gap", allow_inf=True):
    value = float(value)
    if math.isnan(value) or value <= 0 or (not allow_inf and math.isinf(value)):
        raise NonpositiveGap(f"{name} must be positive, got {value}")
    return value


def _check_norm(value, name):
    value = float(value)
    if math.isnan(value) or value < 0:
        raise ValidationError(f"{name} must be a nonnegative number, got {value}")
    return value


def _ratio(a, b):
    """``a / b`` with ``0 / inf = 0``."""
    return 0.0 if a == 0 else a / b


def _inapplicable(name, slack, inputs, extras=None, norm="spectral"):
    return BoundReport(name=name, value=math.inf, applicable=False, slack=slack,
                       norm=norm, inputs=inputs, extras=extras or {})


def dk_classical(res_norm, gap_c):
    """Classical ``||r|| / gap_c``."""
    r = _check_norm(res_norm, "res_norm")
    g = _check_gap(gap_c, "gap_c")
    return BoundReport(name="dk_classical", value=_ratio(r, g),
                       inputs={"r1": r, "gap_c": g})


def bound_2x2(R_norm, R2_norm, gap, Gap):
    """``(||R|| / Gap) * sqrt(1 + ||R2||^2 / gap^2)``; ``gap = inf`` when k = 1."""
    R = _check_norm(R_norm, "R_norm")
    R2 = _check_norm(R2_norm, "R2_norm")
    g = _check_gap(gap, "gap")
    G = _check_gap(Gap, "Gap")
    b = _ratio(R2, g)
    return BoundReport(name="boundvec", value=_ratio(R, G) * math.hypot(1.0, b),
                       inputs={"R": R, "R2": R2, "gap": g, "Gap": G},
                       extras={"prefix": _ratio(R, G), "b": b})


def bound_sin22(r1_norm, R2_norm, gap, Gap):
    """Refined bound using ``||r_1||`` and ``||R_2||``; needs ``Gap > ||R2||^2 / gap``."""
    r1 = _check_norm(r1_norm, "r1_norm")
    R2 = _check_norm(R2_norm, "R2_norm")
    g = _check_gap(gap, "gap")
    G = _check_gap(Gap, "Gap")
    b = _ratio(R2, g)
    slack = G - R2 * b
    inputs = {"r1": r1, "R2": R2, "gap": g, "Gap": G}
    if not slack > 0:
        return _inapplicable("sin22", slack, inputs, {"b": b})
    prefix = _ratio(r1, slack)
    return BoundReport(name="sin22", value=prefix * math.hypot(1.0, b), slack=slack,
                       inputs=inputs, extras={"prefix": prefix, "b": b})


def bound_sin2indiv(r_norms, pair_dists, Gap):
    """Refined bound using individual residual norms.

    Parameters
    ----------
    r_norms : array_like
        ``||r_i||`` with the target first, then the other ``k - 1`` pairs.
    pair_dists : array_like
        ``|lambda - lam_hat_i|`` for the other pairs, same order as ``r_norms[1:]``.
    Gap : float
    """
    r = np.asarray(r_norms, dtype=float).ravel()
    d = np.asarray(pair_dists, dtype=float).ravel()
    if r.size == 0 or d.size != r.size - 1:
        raise ValidationError("need the target residual norm plus one distance per other pair")
    if np.any(np.isnan(r)) or np.any(r < 0):
        raise ValidationError("residual norms must be nonnegative")
    if np.any(~(d > 0)):
        raise NonpositivePairDistance("pair distances must be positive")
    G = _check_gap(Gap, "Gap")
    S2 = float(np.sum(r[1:] ** 2 / d))
    S1 = float(np.sum(r[1:] / d))
    slack = G - S2
    inputs = {"r1": float(r[0]), "Gap": G, "S1": S1, "S2": S2}
    if not slack > 0:
        return _inapplicable("sin2indiv", slack, inputs, {"b": S1})
    prefix = _ratio(float(r[0]), slack)
    return BoundReport(name="sin2indiv", value=prefix * math.hypot(1.0, S1), slack=slack,
                       inputs=inputs, extras={"prefix": prefix, "b": S1})


def min_sqrt_refinement(report_22, report_indiv):
    """Combine the two refined bounds.

    Both bound the complement component ``||z||`` and both bound ``||y|| / ||z||``,
    so the smaller applicable prefix is paired with the smaller square-root factor.
    """
    b = min(report_22.extras["b"], report_indiv.extras["b"])
    prefixes = [r.extras["prefix"] for r in (report_22, report_indiv) if r.applicable]
    name = "min_sqrt"
    inputs = {"b22": report_22.extras["b"], "b_indiv": report_indiv.extras["b"]}
    certified = report_22.certified and report_indiv.certified
    if not prefixes:
        return replace(_inapplicable(name, max(report_22.slack, report_indiv.slack), inputs),
                       certified=certified)
    prefix = min(prefixes)
    slack = max(r.slack for r in (report_22, report_indiv) if r.applicable)
    return BoundReport(name=name, value=prefix * math.hypot(1.0, b), slack=slack,
                       certified=certified, inputs=inputs, extras={"prefix": prefix, "b": b})


def composite_bound(core, gap, u=UNIT_ROUNDOFF, c_round=DEFAULT_C_ROUND, scale=1.0):
    """Finite-precision bound ``min(1, max(c_round * u * scale / gap, core))``.

    ``scale`` is an estimate of ``||A||``; the roundoff term assumes ``||A|| = 1``
    otherwise.
    """
    g = _check_gap(gap, "gap")
    floor = _ratio(c_round * u * scale, g)
    value = min(1.0, max(floor, core.value))
    return BoundReport(name="composite", value=value, applicable=True, slack=core.slack,
                       norm=core.norm, certified=core.certified,
                       inputs={"core": core.name, "core_value": core.value, "gap": g,
                               "u": u, "c_round": c_round, "scale": scale},
                       extras={"floor": floor})


def first_order_estimate(r_i_norm, Gap_i):
    """First-order estimate ``||r_i|| / Gap_i``; not a rigorous bound."""
    r = _check_norm(r_i_norm, "r_i_norm")
    G = _check_gap(Gap_i, "Gap_i")
    return BoundReport(name="first_order", value=_ratio(r, G), certified=False,
                       inputs={"r1": r, "Gap": G}, extras={"estimate": True})


def _split_norms(decomp, i):
    others = np.delete(np.arange(decomp.k), i)
    R2 = spectral_norm(decomp.residual_columns[:, others])
    return float(decomp.residual_norms[i]), R2, others


def partition_sweep(decomp, i, oracle_eigs, eig_index=None):
    """Minimum of :func:`bound_2x2` over all leading-block sizes containing pair ``i``.

    For leading size ``kp`` the Ritz pairs ``kp..k-1`` are moved into the
    complement block, so ``Gap`` is recomputed from the enlarged ``A3``.
    ``extras["argmin"]`` is the minimizing ``kp`` and ``extras["values"]``
    maps each ``kp`` to its bound.
    """
    decomp.require_complement()
    decomp.check_index(i)
    eigs = np.asarray(oracle_eigs, dtype=float)
    lam = float(eigs[i if eig_index is None else eig_index])
    vals = decomp.ritz_values
    Rfull = decomp.R_block
    A3 = decomp.A3
    results = {}
    for kp in range(i + 1, decomp.k + 1):
        lead = np.arange(kp)
        others = np.delete(lead, i)
        gap = _min_dist(lam, vals[others])
        rest = np.arange(kp, decomp.k)
        if rest.size:
            Rr = Rfull[:, rest]
            block = np.block([[np.diag(vals[rest]), Rr.T], [Rr, A3]])
        else:
            block = A3
        Gap = _min_dist(lam, symmetric_eigvals(block))
        if not (Gap > 0 and gap > 0):
            continue
        R = spectral_norm(decomp.residual_columns[:, lead])
        R2 = spectral_norm(decomp.residual_columns[:, others])
        results[kp] = bound_2x2(R, R2, gap, Gap).value
    if not results:
        return _inapplicable("partition_sweep", math.nan, {"lambda": lam})
    best = min(results, key=results.get)
    return BoundReport(name="partition_sweep", value=results[best],
                       inputs={"lambda": lam}, extras={"argmin": best, "values": results})


def eigen_bounds(decomp, gaps, u=UNIT_ROUNDOFF, c_round=DEFAULT_C_ROUND, scale=1.0):
    """All single-vector bounds for ``gaps.target_index``, keyed by name.

    The classical bound uses ``gap_c`` when available and ``gap`` otherwise.
    The composite is built on the smallest applicable rigorous bound.
    """
    i = gaps.target_index
    r1, R2, others = _split_norms(decomp, i)
    if list(others) != list(gaps.other_indices):
        raise ValidationError("gap data does not match the decomposition")
    reports = {}
    gap_c = gaps.gap_c if gaps.gap_c is not None else gaps.gap
    if gap_c > 0:
        reports["dk_classical"] = dk_classical(r1, gap_c)
    if gaps.Gap > 0 and gaps.gap > 0:
        reports["boundvec"] = bound_2x2(decomp.residual_total_norm, R2, gaps.gap, gaps.Gap)
        reports["sin22"] = bound_sin22(r1, R2, gaps.gap, gaps.Gap)
        if np.all(gaps.pair_dists > 0):
            r_norms = np.concatenate([[r1], decomp.residual_norms[others]])
            reports["sin2indiv"] = bound_sin2indiv(r_norms, gaps.pair_dists, gaps.Gap)
            reports["min_sqrt"] = min_sqrt_refinement(reports["sin22"], reports["sin2indiv"])
        reports["first_order"] = first_order_estimate(r1, gaps.Gap)
    reports = {name: rep.with_mode(gaps.mode) for name, rep in reports.items()}
    rigorous = [rep for name, rep in reports.items()
                if name in ("boundvec", "sin22", "sin2indiv", "min_sqrt") and rep.applicable]
    if rigorous and gaps.gap > 0:
        core = min(rigorous, key=lambda rep: rep.value)
        reports["composite"] = composite_bound(core, gaps.gap, u=u, c_round=c_round, scale=scale)
    return reports
