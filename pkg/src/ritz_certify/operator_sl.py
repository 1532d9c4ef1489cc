"""Rayleigh-Ritz for the Sturm-Liouville problem ``u'' = lambda u`` on ``[0, pi]``.

The boundary conditions are ``u'(0) = alpha u(0)`` and ``u'(pi) = beta u(pi)``.
For ``alpha = 1, beta = -1`` the operator is negative definite with
eigenvalues ``-nu_i^2``, where ``nu_i`` are the positive roots of
``(nu^2 + alpha beta) sin(pi nu) - (alpha - beta) nu cos(pi nu)``, and
eigenfunctions ``nu cos(nu x) + alpha sin(nu x)``.

Trial functions are polynomials stored as Legendre series on ``[0, pi]``, so
differentiation is exact and every residual is again a polynomial. Inner
products use Gauss-Legendre quadrature that is exact for the degrees involved.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from numpy.polynomial import Legendre
from numpy.polynomial import legendre as L
from scipy.optimize import brentq

from . import bounds_eigen as be
from .errors import QuadratureTooCoarse, RootBracketFailure, ValidationError
from .gap_model import ESTIMATED, EXACT

DOMAIN = (0.0, math.pi)
SIGN_POINT = 1.0
ORACLE_NODES = 200


@dataclass(frozen=True)
class PolyFunction:
    """Polynomial on ``[0, pi]`` given by Legendre coefficients."""

    coeffs: np.ndarray

    @classmethod
    def from_legendre(cls, series):
        return cls(np.asarray(series.coef, dtype=float))

    @property
    def series(self):
        return Legendre(self.coeffs, domain=DOMAIN)

    @property
    def degree(self):
        nz = np.flatnonzero(self.coeffs)
        return int(nz[-1]) if nz.size else 0

    def __call__(self, x):
        return self.series(x)

    def deriv(self, m=1):
        return PolyFunction.from_legendre(self.series.deriv(m))

    def padded(self, length):
        out = np.zeros(max(length, self.coeffs.size))
        out[:self.coeffs.size] = self.coeffs
        return out


def combine(funcs, weights):
    """``sum_j weights[j] * funcs[j]``."""
    length = max(f.coeffs.size for f in funcs)
    C = np.column_stack([f.padded(length) for f in funcs])
    return PolyFunction(C @ np.asarray(weights, dtype=float))


def gauss_rule(size):
    """Gauss-Legendre nodes and weights mapped to ``[0, pi]``."""
    t, w = L.leggauss(size)
    half = 0.5 * (DOMAIN[1] - DOMAIN[0])
    return half * (t + 1.0) + DOMAIN[0], half * w


@dataclass(frozen=True, eq=False)
class SturmLiouvilleProblem:
    """Robin coefficients plus a quadrature rule sized for ``max_degree``."""

    alpha: float = 1.0
    beta: float = -1.0
    max_degree: int = 16
    quad_size: Optional[int] = None
    nodes: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        size = 4 * self.max_degree if self.quad_size is None else int(self.quad_size)
        if size < 4 * self.max_degree:
            raise QuadratureTooCoarse(
                f"quadrature size {size} < 4 * max degree {self.max_degree}")
        object.__setattr__(self, "quad_size", size)
        x, w = gauss_rule(size)
        object.__setattr__(self, "nodes", x)
        object.__setattr__(self, "weights", w)

    def inner(self, f, g):
        return float(np.sum(self.weights * f(self.nodes) * g(self.nodes)))

    def norm(self, f):
        return math.sqrt(max(self.inner(f, f), 0.0))

    def boundary_residuals(self, p):
        """``(p'(0) - alpha p(0), p'(pi) - beta p(pi))``."""
        dp = p.deriv()
        a, b = DOMAIN
        return dp(a) - self.alpha * p(a), dp(b) - self.beta * p(b)

    def characteristic(self, nu):
        """Zero exactly at ``nu_i``; equivalent to ``tan(pi nu) = (alpha - beta) nu / (nu^2 + alpha beta)``."""
        ab = self.alpha * self.beta
        return (nu * nu + ab) * np.sin(np.pi * nu) - (self.alpha - self.beta) * nu * np.cos(np.pi * nu)


def constrained_basis(k, problem):
    """``k`` L2-orthonormal polynomials of degrees ``<= k + 1`` satisfying both boundary conditions.

    Degree ``d`` (``2 <= d <= k + 1``) contributes ``P_d + a P_0 + b P_1`` with
    ``a, b`` fixed by the two constraints; Gram-Schmidt in increasing degree
    keeps the trial spaces nested in ``k``.
    """
    if k < 1:
        raise ValidationError("k must be at least 1")
    if k + 1 > problem.max_degree:
        raise QuadratureTooCoarse(
            f"degree {k + 1} exceeds the quadrature's max degree {problem.max_degree}")
    P0 = PolyFunction(np.array([1.0]))
    P1 = PolyFunction(np.array([0.0, 1.0]))
    c0 = problem.boundary_residuals(P0)
    c1 = problem.boundary_residuals(P1)
    M = np.array([[c0[0], c1[0]], [c0[1], c1[1]]])
    if abs(np.linalg.det(M)) < 1e-12:
        raise ValidationError("boundary conditions do not determine the low-degree correction")
    raw = []
    for d in range(2, k + 2):
        e = np.zeros(d + 1)
        e[d] = 1.0
        Pd = PolyFunction(e)
        a, b = np.linalg.solve(M, -np.array(problem.boundary_residuals(Pd)))
        e[0], e[1] = a, b
        raw.append(PolyFunction(e))
    basis = []
    for p in raw:
        for _ in range(2):
            if basis:
                p = combine([p] + basis, [1.0] + [-problem.inner(q, p) for q in basis])
        p = PolyFunction(p.coeffs / problem.norm(p))
        basis.append(p)
    return basis


@dataclass(frozen=True)
class ExactSpectrum:
    nu: np.ndarray
    eigenvalues: np.ndarray
    norms: np.ndarray
    alpha: float

    def eigenfunction(self, i):
        """Normalized ``i``-th eigenfunction (0-based) as a callable."""
        nu, c, a = self.nu[i], 1.0 / self.norms[i], self.alpha
        return lambda x: c * (nu * np.cos(nu * x) + a * np.sin(nu * x))


def exact_eigenvalues(problem, count):
    """First ``count`` eigenvalues ``-nu_i^2`` (descending) and eigenfunctions.

    Root ``i`` (0-based) is bracketed in ``(i, i + 1)``. Failure to bracket
    raises :class:`RootBracketFailure` with the branch index.
    """
    if not 1 <= count <= 20:
        raise ValidationError("count must lie in 1..20")
    g = problem.characteristic
    nus = []
    for i in range(count):
        a, b = (1e-3 if i == 0 else float(i)), float(i + 1)
        ga, gb = g(a), g(b)
        if ga == 0.0:
            nus.append(a)
            continue
        if np.sign(ga) == np.sign(gb):
            raise RootBracketFailure(f"no sign change on branch {i} ({a}, {b})", branch=i)
        nus.append(brentq(g, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200))
    nu = np.array(nus)
    al = problem.alpha
    pi = math.pi
    s2 = np.sin(2 * pi * nu)
    c2 = np.cos(2 * pi * nu)
    sq = nu ** 2 * (pi / 2 + s2 / (4 * nu)) + al ** 2 * (pi / 2 - s2 / (4 * nu)) + al * (1 - c2) / 2
    return ExactSpectrum(nu=nu, eigenvalues=-nu ** 2, norms=np.sqrt(sq), alpha=al)


@dataclass(frozen=True, eq=False)
class OperatorRitz:
    """Ritz data for the operator.

    Ritz values are sorted descending (closest to zero first), so index 0 is
    the approximation to the ground mode ``-nu_1^2``.
    """

    problem: SturmLiouvilleProblem
    basis: list
    ritz_values: np.ndarray
    ritz_functions: list
    residual_functions: list
    residual_norms: np.ndarray
    residual_gram: np.ndarray
    projection_defect: np.ndarray

    @property
    def k(self):
        return len(self.basis)

    def block_norm(self, idx):
        idx = np.asarray(idx, dtype=int)
        if idx.size == 0:
            return 0.0
        G = self.residual_gram[np.ix_(idx, idx)]
        return math.sqrt(max(float(np.linalg.eigvalsh(G)[-1]), 0.0))

    @property
    def R_norm(self):
        return self.block_norm(np.arange(self.k))

    def leading(self, kp):
        """Rayleigh-Ritz data for ``span(u_hat_1..u_hat_kp)``.

        The Ritz pairs of that subspace are the first ``kp`` pairs here, with
        the same residual functions.
        """
        if not 1 <= kp <= self.k:
            raise ValidationError(f"kp must lie in 1..{self.k}, got {kp}")
        return OperatorRitz(
            problem=self.problem,
            basis=self.ritz_functions[:kp],
            ritz_values=self.ritz_values[:kp],
            ritz_functions=self.ritz_functions[:kp],
            residual_functions=self.residual_functions[:kp],
            residual_norms=self.residual_norms[:kp],
            residual_gram=self.residual_gram[:kp, :kp],
            projection_defect=self.projection_defect[:kp],
        )

    @property
    def R2_norm(self):
        return self.block_norm(np.arange(1, self.k))


def rr_operator(problem, basis):
    """Rayleigh-Ritz on ``span(basis)`` with exact second derivatives."""
    k = len(basis)
    second = [q.deriv(2) for q in basis]
    H = np.array([[problem.inner(basis[i], second[j]) for j in range(k)] for i in range(k)])
    H = 0.5 * (H + H.T)
    vals, Om = np.linalg.eigh(H)
    order = np.argsort(vals)[::-1]
    vals, Om = vals[order], Om[:, order]
    funcs, resid, defect = [], [], []
    for j in range(k):
        u = combine(basis, Om[:, j])
        if u(SIGN_POINT) < 0:
            u = PolyFunction(-u.coeffs)
        rho = combine([u.deriv(2), u], [1.0, -vals[j]])
        proj = np.array([problem.inner(q, rho) for q in basis])
        defect.append(float(np.max(np.abs(proj))))
        rho = combine([rho] + basis, np.concatenate([[1.0], -proj]))
        funcs.append(u)
        resid.append(rho)
    G = np.array([[problem.inner(a, b) for b in resid] for a in resid])
    return OperatorRitz(
        problem=problem,
        basis=list(basis),
        ritz_values=vals,
        ritz_functions=funcs,
        residual_functions=resid,
        residual_norms=np.sqrt(np.clip(np.diag(G), 0.0, None)),
        residual_gram=G,
        projection_defect=np.array(defect),
    )


def true_angle(rr, spectrum, i=0, nodes=ORACLE_NODES):
    """``sin`` of the angle between Ritz function ``i`` and eigenfunction ``i``.

    Computed as ``||u - <u, u_hat> u_hat||`` with a high-order quadrature,
    which avoids the cancellation in ``sqrt(1 - cos^2)``.
    """
    x, w = gauss_rule(nodes)
    u = spectrum.eigenfunction(i)(x)
    uh = rr.ritz_functions[i](x)
    uh = uh / math.sqrt(np.sum(w * uh * uh))
    u = u / math.sqrt(np.sum(w * u * u))
    d = u - np.sum(w * u * uh) * uh
    return float(math.sqrt(np.sum(w * d * d)))


def low_degree_mass_fraction(f, degree):
    """Fraction of ``||f||^2`` carried by Legendre modes of degree ``< degree``."""
    c = f.coeffs
    wts = math.pi / (2 * np.arange(c.size) + 1)
    total = float(np.sum(wts * c * c))
    if total == 0.0:
        return 0.0
    return float(np.sum((wts * c * c)[:degree]) / total)


@dataclass(frozen=True)
class OperatorGaps:
    """Gaps for the ground mode; ``A33_upper`` bounds ``max lambda(A33)`` when certified."""

    lam: float
    gap: float
    Gap: float
    gap_c: float
    pair_dists: np.ndarray
    certified: bool
    A33_upper: float
    split: int


def a33_upper_bound(rr, spectrum):
    """Rigorous upper bound on the top of the spectrum of ``A33``, or ``None``.

    For unit ``v`` orthogonal to the trial space, compress the operator onto
    ``span(u_hat_1..u_hat_m, v)``. Interlacing puts the smallest eigenvalue of
    that arrowhead matrix at or below ``lambda_{m+1}``; when
    ``lam_hat_m > lambda_{m+1}`` the secular equation turns this into

        <v, A v> <= lambda_{m+1} + lambda_max(D^{-1/2} G_m D^{-1/2}),

    with ``G_m`` the residual Gram matrix of the first ``m`` Ritz pairs and
    ``D = diag(lam_hat_j - lambda_{m+1})``. The best ``m`` is returned
    together with the bound.
    """
    best = None
    lams = spectrum.eigenvalues
    for m in range(1, rr.k + 1):
        if m >= lams.size:
            break
        nxt = float(lams[m])
        d = rr.ritz_values[:m] - nxt
        if not np.all(d > 0):
            continue
        s = 1.0 / np.sqrt(d)
        G = rr.residual_gram[:m, :m] * np.outer(s, s)
        upper = nxt + max(float(np.linalg.eigvalsh(G)[-1]), 0.0)
        if best is None or upper < best[0]:
            best = (upper, m)
    return best


def operator_gaps(rr, spectrum):
    """Gaps for the ground mode.

    ``gap`` and the pair distances use the exact ``lambda_1`` against the other
    Ritz values. ``lambda(A33)`` is not computable; :func:`a33_upper_bound`
    supplies a certified lower bound ``Gap >= lambda_1 - upper``. If no split
    certifies a positive value the estimate ``lambda_1 - lambda_{k+1}`` is
    returned and ``certified`` is false.
    """
    k = rr.k
    if spectrum.eigenvalues.size < k + 1:
        raise ValidationError(f"need at least {k + 1} exact eigenvalues")
    lam = float(spectrum.eigenvalues[0])
    dists = np.abs(lam - rr.ritz_values[1:])
    found = a33_upper_bound(rr, spectrum)
    if found is not None and lam - found[0] > 0:
        upper, split = found
        Gap, certified = lam - upper, True
    else:
        upper, split = math.nan, 0
        Gap, certified = lam - float(spectrum.eigenvalues[k]), False
    return OperatorGaps(
        lam=lam,
        gap=float(dists.min()) if dists.size else math.inf,
        Gap=float(Gap),
        gap_c=float(abs(rr.ritz_values[0] - spectrum.eigenvalues[1])),
        pair_dists=dists,
        certified=certified,
        A33_upper=upper,
        split=split,
    )


def operator_bounds(rr, gaps):
    """Single-vector bounds for the ground mode from operator-sourced norms."""
    r1 = float(rr.residual_norms[0])
    R2 = rr.R2_norm
    out = {"dk_classical": be.dk_classical(r1, gaps.gap_c)}
    if gaps.Gap > 0 and gaps.gap > 0:
        out["boundvec"] = be.bound_2x2(rr.R_norm, R2, gaps.gap, gaps.Gap)
        out["sin22"] = be.bound_sin22(r1, R2, gaps.gap, gaps.Gap)
        r = np.concatenate([[r1], rr.residual_norms[1:]])
        out["sin2indiv"] = be.bound_sin2indiv(r, gaps.pair_dists, gaps.Gap)
        out["min_sqrt"] = be.min_sqrt_refinement(out["sin22"], out["sin2indiv"])
    mode = EXACT if gaps.certified else ESTIMATED
    return {name: (rep if name == "dk_classical" else rep.with_mode(mode))
            for name, rep in out.items()}


SWEEP_FAMILIES = ("boundvec", "sin22", "sin2indiv", "min_sqrt")


def operator_partition_sweep(rr, spectrum):
    """Each refined family minimized over trial spaces ``span(u_hat_1..u_hat_kp)``.

    Every leading block is itself a Rayleigh-Ritz trial space with the same
    Ritz pairs, so each ``kp`` gives valid bounds; dropping the poorly
    resolved high pairs removes their large residuals from ``||R_2||`` and
    the individual-residual sums. ``extras["argmin"]`` is the chosen ``kp``.
    """
    best = {}
    for kp in range(1, rr.k + 1):
        sub = rr.leading(kp)
        reps = operator_bounds(sub, operator_gaps(sub, spectrum))
        for name in SWEEP_FAMILIES:
            rep = reps.get(name)
            if rep is None or not rep.applicable:
                continue
            if name not in best or rep.value < best[name].value:
                best[name] = replace(rep, extras={**rep.extras, "argmin": kp})
    return {f"{name}_sweep": replace(rep, name=f"{name}_sweep") for name, rep in best.items()}
