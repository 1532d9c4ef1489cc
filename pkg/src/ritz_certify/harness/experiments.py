"""Experiment generators with brute-force oracles.

Each ``run_*`` function takes an :class:`ExperimentConfig`, returns the main
:class:`Table` and, when ``config.output_dir`` is set, writes it (plus any
auxiliary files) as CSV. Trials draw from their own stream keyed by
``(seed, trial)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.stats import ortho_group

from .. import bounds_eigen as be
from .. import bounds_subspace as bs
from .. import bounds_svd as bsv
from .. import operator_sl as sl
from ..errors import ValidationError
from ..gap_model import ESTIMATED, EXACT, estimated_gaps, exact_gaps
from ..lobpcg import lobpcg_run
from ..matrix_core import (
    UNIT_ROUNDOFF,
    SymmetricProblem,
    orthonormalize,
    principal_angles,
    symmetric_eig,
)
from ..rayleigh_ritz import rr_decompose, write_decomposition
from ..readers import read_array, read_symmetric
from ..rng import make_rng
from .report import Table, bound_value, write_csv

EXPERIMENTS = ("fig2", "laplacian", "svd", "sturm", "bounds-on-file")
FIG2_LEVELS = tuple(range(16))
SAMPLE_KS = (3, 6, 9)
SAMPLE_POINTS = 201
# Fixed Legendre cutoff for the oscillation proxy: modes below the smallest sampled k.
LOW_DEGREE_CUTOFF = min(SAMPLE_KS)


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    n: int = 10
    k: int = 2
    k1: int = 1
    block_size: int = 50
    iters: int = 40
    gap_setting: float = 1e-3
    trials: int = 100
    seed: int = 0
    mode: str = EXACT
    kmax: int = 12
    c_round: float = be.DEFAULT_C_ROUND
    output_dir: Optional[Path] = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValidationError(f"unknown experiment {self.experiment!r}")
        if self.trials < 1:
            raise ValidationError("trials must be at least 1")
        if self.mode not in (EXACT, ESTIMATED):
            raise ValidationError(f"unknown mode {self.mode!r}")
        for name in ("n", "k", "k1", "block_size"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be positive")
        if self.iters < 0:
            raise ValidationError("iters must be nonnegative")


def _out(config, name):
    if config.output_dir is None:
        return None
    return Path(config.output_dir) / name


# ---------------------------------------------------------------------------
# 2 x 2 partition experiment


def fig2_instance(rng, n, gap, R_norm):
    """``A = [[Lambda_hat_1, R^T], [R, A3]]`` with ``Lambda_hat_1 = -diag(1 + gap, 1)``.

    ``A3 = Q D Q^T`` with ``D`` uniform on ``[1, 2]`` and ``Q`` Haar
    orthogonal; ``R`` is standard normal scaled to spectral norm ``R_norm``.
    """
    m = n - 2
    Qd = ortho_group.rvs(m, random_state=rng) if m > 1 else np.ones((1, 1))
    D = rng.uniform(1.0, 2.0, m)
    A3 = (Qd * D) @ Qd.T
    R = rng.standard_normal((m, 2))
    R = R * (R_norm / np.linalg.norm(R, 2)) if R_norm > 0 else np.zeros_like(R)
    A = np.zeros((n, n))
    A[0, 0], A[1, 1] = -(1.0 + gap), -1.0
    A[2:, :2] = R
    A[:2, 2:] = R.T
    A[2:, 2:] = 0.5 * (A3 + A3.T)
    return A


def fig2_observed_sin(A):
    """``sin`` of the angle between ``e_1`` and the eigenvector of the smallest eigenvalue."""
    _, V = np.linalg.eigh(A)
    return float(np.linalg.norm(V[1:, 0]))


def fig2_curves(R_norm, gap, Gap, scale=1.0, c_round=be.DEFAULT_C_ROUND):
    """Classical, new (``||R2||`` replaced by ``||R||``), ``u / gap`` and composite curves."""
    dk = R_norm / gap
    new = R_norm / Gap * math.hypot(1.0, R_norm / gap)
    floor = c_round * UNIT_ROUNDOFF * scale / gap
    return dk, new, UNIT_ROUNDOFF / gap, min(1.0, max(floor, new))


def run_fig2(config):
    """Observed worst ``sin`` per ``||R||`` level and the four curves.

    The curves use the prescribed ``gap`` and ``Gap >= 2 + gap``, which holds
    for every instance since the target eigenvalue is at most ``-1 - gap`` and
    ``lambda(A3) >= 1``; both are lower bounds on the instance gaps.
    """
    gap = float(config.gap_setting)
    if not gap > 0:
        raise ValidationError("gap_setting must be positive")
    if config.n < 3:
        raise ValidationError("n must be at least 3")
    Gap = 2.0 + gap
    table = Table(["level", "R_norm", "observed_max", "dk_bound", "new_bound",
                   "u_over_gap", "composite", "gap", "Gap"])
    for level in FIG2_LEVELS:
        R_norm = 10.0 ** (-level)
        worst = 0.0
        for t in range(config.trials):
            rng = make_rng(config.seed, level * config.trials + t)
            worst = max(worst, fig2_observed_sin(fig2_instance(rng, config.n, gap, R_norm)))
        scale = max(1.0 + gap, 2.0) + R_norm
        dk, new, ug, comp = fig2_curves(R_norm, gap, Gap, scale, config.c_round)
        table.add(level=level, R_norm=R_norm, observed_max=worst, dk_bound=dk, new_bound=new,
                  u_over_gap=ug, composite=comp, gap=gap, Gap=Gap)
    path = _out(config, f"fig2_gap{gap:.0e}.csv")
    if path is not None:
        write_csv(table, path)
    return table


# ---------------------------------------------------------------------------
# LOBPCG on the 1D Laplacian


def laplacian_problem(n):
    return SymmetricProblem.from_tridiagonal(2.0 * np.ones(n), -np.ones(n - 1))


def laplacian_eigenpair(n, j=1):
    """``lambda_j = 2 - 2 cos(j pi / (n + 1))`` and its unit eigenvector (``j`` is 1-based)."""
    t = j * math.pi / (n + 1)
    x = math.sqrt(2.0 / (n + 1)) * np.sin(t * np.arange(1, n + 1))
    return 2.0 - 2.0 * math.cos(t), x


LAPLACIAN_COLUMNS = ["iteration", "exact_sin", "dk", "sin22", "sin2indiv", "boundvec",
                     "min_sqrt", "composite", "first_order", "r1", "rk", "R_norm",
                     "ritz_value", "gap", "Gap"]


def laplacian_row(decomp, x1, c_round=be.DEFAULT_C_ROUND):
    """Bounds for the smallest Ritz pair in estimated-gap mode plus the oracle angle."""
    gaps = estimated_gaps(decomp, 0)
    reps = be.eigen_bounds(decomp, gaps, c_round=c_round, scale=decomp.problem.scale_hint)
    sin = principal_angles(x1, decomp.ritz_vectors[:, 0]).spectral_sin
    return dict(exact_sin=sin, dk=bound_value(reps.get("dk_classical")),
                sin22=bound_value(reps.get("sin22")), sin2indiv=bound_value(reps.get("sin2indiv")),
                boundvec=bound_value(reps.get("boundvec")),
                min_sqrt=bound_value(reps.get("min_sqrt")),
                composite=bound_value(reps.get("composite")),
                first_order=bound_value(reps.get("first_order")),
                r1=decomp.residual_norms[0], rk=decomp.residual_norms[-1],
                R_norm=decomp.residual_total_norm, ritz_value=decomp.ritz_values[0],
                gap=gaps.gap, Gap=gaps.Gap)


def run_laplacian(config, scatter_iteration=20):
    """LOBPCG on ``tridiag(-1, 2, -1)`` with per-iteration bounds for the smallest pair.

    Also returns the LOBPCG state; the history and the residual scatter at
    ``scatter_iteration`` are written next to the main table.
    """
    n, b = config.n, config.block_size
    if n < 3 * b:
        raise ValidationError(f"need n >= 3 * block_size, got n={n}, block_size={b}")
    problem = laplacian_problem(n)
    _, x1 = laplacian_eigenpair(n, 1)
    table = Table(LAPLACIAN_COLUMNS)
    scatter = Table(["i", "ritz_value", "residual_norm"])

    def record(it, decomp):
        table.add(iteration=it, **laplacian_row(decomp, x1, config.c_round))
        if it == scatter_iteration:
            for i, (v, r) in enumerate(zip(decomp.ritz_values, decomp.residual_norms)):
                scatter.add(i=i, ritz_value=v, residual_norm=r)

    state = lobpcg_run(problem, b, iters=config.iters, seed=config.seed, callback=record)
    path = _out(config, "laplacian.csv")
    if path is not None:
        write_csv(table, path)
        write_csv(scatter, path.with_name("laplacian_residuals.csv"))
        state.write_history(path.with_name("laplacian_history.csv"))
    return table, state


# ---------------------------------------------------------------------------
# Projection SVD


SVD_SHAPE = (60, 40)
SVD_K = (8, 10, 4)  # k_m, k_n, k1
SVD_LEVELS = tuple(range(6))
SVD_DECAY = 0.7


def planted_matrix(rng, m, n, decay=SVD_DECAY):
    """``U diag(decay^j) V^T`` with Haar-random ``U``, ``V``."""
    p = min(m, n)
    U = ortho_group.rvs(m, random_state=rng)[:, :p]
    V = ortho_group.rvs(n, random_state=rng)[:, :p]
    s = decay ** np.arange(p)
    return (U * s) @ V.T


def sketch_bases(rng, M, k_m, k_n, power):
    """Trial bases from ``power`` steps of subspace iteration on random sketches."""
    Y = M @ rng.standard_normal((M.shape[1], k_m))
    Z = M.T @ rng.standard_normal((M.shape[0], k_n))
    for _ in range(power):
        Y = orthonormalize(Y)
        Y = M @ (M.T @ Y)
        Z = orthonormalize(Z)
        Z = M.T @ (M @ Z)
    return orthonormalize(Y), orthonormalize(Z)


def svd_columns():
    cols = ["level", "trial", "k_m", "k_n", "k1", "theta_spectral", "theta_frobenius",
            "Gap", "gap"]
    for name in ("svd_boundvec", "svd_sin22", "svd_sin2indiv"):
        for norm in bsv.NORMS:
            cols.append(f"{name}_{norm}")
    return cols


def svd_row(M, U_trial, V_trial, k1, full=None):
    proj = bsv.project_svd(M, U_trial, V_trial, k1)
    oracle = bsv.svd_oracle(M, proj, full)
    gaps = bsv.svd_gaps(proj, oracle.singulars)
    reps = bsv.svd_bounds(proj, gaps)
    row = dict(k_m=proj.k_m, k_n=proj.k_n, k1=k1, theta_spectral=oracle.theta_spectral,
               theta_frobenius=oracle.theta_frobenius, Gap=gaps.Gap, gap=gaps.gap)
    for (name, norm), rep in reps.items():
        row[f"{name}_{norm}"] = bound_value(rep)
    return row


def run_svd_experiment(config):
    """Planted-decay matrices, sketch quality indexed by the number of power steps."""
    m, n = SVD_SHAPE
    k_m, k_n, k1 = SVD_K
    table = Table(svd_columns())
    for level in SVD_LEVELS:
        for t in range(config.trials):
            rng = make_rng(config.seed, level * config.trials + t)
            M = planted_matrix(rng, m, n)
            U, V = sketch_bases(rng, M, k_m, k_n, level)
            table.add(level=level, trial=t, **svd_row(M, U, V, k1))
    path = _out(config, "svd.csv")
    if path is not None:
        write_csv(table, path)
    return table


# ---------------------------------------------------------------------------
# Sturm-Liouville


STURM_COLUMNS = ["k", "ritz_value", "exact_lambda", "ritz_error", "r1", "R_norm", "R2_norm",
                 "gap", "Gap", "certified", "dk", "boundvec", "sin22", "sin2indiv",
                 "min_sqrt", "boundvec_sweep", "sin22_sweep", "sin2indiv_sweep", "min_sqrt_sweep",
                 "sweep_kp", "composite", "true_angle", "low_mass_fixed", "low_mass_below_k"]


def sturm_row(rr, spectrum, c_round=be.DEFAULT_C_ROUND):
    gaps = sl.operator_gaps(rr, spectrum)
    reps = sl.operator_bounds(rr, gaps)
    reps.update(sl.operator_partition_sweep(rr, spectrum))
    scale = float(np.max(np.abs(rr.ritz_values)))
    rigorous = [r for n_, r in reps.items() if n_ != "dk_classical" and r.applicable]
    comp = None
    if rigorous and gaps.gap > 0:
        core = min(rigorous, key=lambda r: r.value)
        comp = be.composite_bound(core, gaps.gap, c_round=c_round, scale=scale).value
    r1 = rr.residual_functions[0]
    return dict(k=rr.k, ritz_value=rr.ritz_values[0], exact_lambda=gaps.lam,
                ritz_error=rr.ritz_values[0] - gaps.lam, r1=rr.residual_norms[0],
                R_norm=rr.R_norm, R2_norm=rr.R2_norm, gap=gaps.gap, Gap=gaps.Gap,
                certified=gaps.certified,
                dk=bound_value(reps.get("dk_classical")),
                boundvec=bound_value(reps.get("boundvec")),
                sin22=bound_value(reps.get("sin22")),
                sin2indiv=bound_value(reps.get("sin2indiv")),
                min_sqrt=bound_value(reps.get("min_sqrt")),
                boundvec_sweep=bound_value(reps.get("boundvec_sweep")),
                sin22_sweep=bound_value(reps.get("sin22_sweep")),
                sin2indiv_sweep=bound_value(reps.get("sin2indiv_sweep")),
                min_sqrt_sweep=bound_value(reps.get("min_sqrt_sweep")),
                sweep_kp=reps["sin2indiv_sweep"].extras["argmin"] if "sin2indiv_sweep" in reps else None,
                composite=comp,
                true_angle=sl.true_angle(rr, spectrum),
                low_mass_fixed=sl.low_degree_mass_fraction(r1, LOW_DEGREE_CUTOFF),
                low_mass_below_k=sl.low_degree_mass_fraction(r1, rr.k))


def run_sturm(config, kmin=2):
    """Convergence table over ``k = kmin..kmax`` and residual samples for ``k`` in 3, 6, 9."""
    kmax = config.kmax
    if not 2 <= kmin <= kmax <= 12:
        raise ValidationError(f"k range must lie within 2..12, got {kmin}..{kmax}")
    problem = sl.SturmLiouvilleProblem(max_degree=16)
    spectrum = sl.exact_eigenvalues(problem, 20)
    table = Table(STURM_COLUMNS)
    samples = {}
    x = np.linspace(sl.DOMAIN[0], sl.DOMAIN[1], SAMPLE_POINTS)
    for k in range(kmin, kmax + 1):
        rr = sl.rr_operator(problem, sl.constrained_basis(k, problem))
        table.add(**sturm_row(rr, spectrum, config.c_round))
        if k in SAMPLE_KS:
            samples[k] = rr.residual_functions[0](x)
    base = _out(config, "sturm.csv")
    if base is not None:
        write_csv(table, base)
        for k, vals in samples.items():
            t = Table(["x", "residual"])
            for xi, vi in zip(x, vals):
                t.add(x=xi, residual=vi)
            write_csv(t, base.with_name(f"sturm_residual_k{k}.csv"))
    return table, samples


# ---------------------------------------------------------------------------
# Bounds for user-supplied inputs


BOUND_COLUMNS = ["i", "name", "norm", "value", "applicable", "slack", "certified", "mode",
                 "gap", "Gap", "gap_c", "oracle_sin"]
EIGEN_ORDER = ("dk_classical", "boundvec", "sin22", "sin2indiv", "min_sqrt", "first_order",
               "composite")


def bounds_on_file(matrix_path, basis_path, mode=EXACT, k1=None, output_dir=None,
                   c_round=be.DEFAULT_C_ROUND):
    """Rayleigh-Ritz plus every applicable bound for each Ritz pair.

    Exact mode materializes the complement and runs the dense oracle; the
    ``oracle_sin`` column then holds the true angle. With ``k1`` the subspace
    bounds for the ``k1`` smallest Ritz pairs are appended (``i`` left empty).
    """
    problem = read_symmetric(matrix_path)
    Q = read_array(basis_path)
    if Q.ndim == 1:
        Q = Q[:, None]
    Q = orthonormalize(Q)
    exact = mode == EXACT
    if mode not in (EXACT, ESTIMATED):
        raise ValidationError(f"unknown mode {mode!r}")
    decomp = rr_decompose(problem, Q, materialize_complement=exact)
    oracle = symmetric_eig(problem) if exact else None
    table = Table(BOUND_COLUMNS)
    for i in range(decomp.k):
        if exact:
            gaps = exact_gaps(decomp, i, oracle[0])
            theta = principal_angles(oracle[1][:, i], decomp.ritz_vectors[:, i]).spectral_sin
        else:
            gaps = estimated_gaps(decomp, i)
            theta = None
        reps = be.eigen_bounds(decomp, gaps, c_round=c_round, scale=problem.scale_hint)
        for name in EIGEN_ORDER:
            if name in reps:
                rep = reps[name]
                table.add(i=i, name=name, norm=rep.norm, value=rep.value,
                          applicable=rep.applicable, slack=rep.slack, certified=rep.certified,
                          mode=mode, gap=gaps.gap, Gap=gaps.Gap, gap_c=gaps.gap_c,
                          oracle_sin=theta)
    if k1 is not None:
        inp = bs.subspace_inputs(decomp, k1, oracle[0] if exact else None, mode=mode)
        thetas = {}
        if exact:
            pa = principal_angles(oracle[1][:, :k1], decomp.ritz_vectors[:, :k1])
            thetas = {"spectral": pa.spectral_sin, "frobenius": pa.frobenius_sin,
                      "unitarily_invariant": pa.spectral_sin}
        for (name, norm), rep in bs.subspace_bounds(inp).items():
            table.add(i=None, name=name, norm=norm, value=rep.value, applicable=rep.applicable,
                      slack=rep.slack, certified=rep.certified, mode=mode, gap=inp.gap,
                      Gap=inp.Gap, oracle_sin=thetas.get(norm))
    if output_dir is not None:
        out = Path(output_dir)
        write_csv(table, out / "bounds.csv")
        write_decomposition(decomp, out, "decomposition")
    return table


def run_experiment(config):
    """Dispatch on ``config.experiment``; returns the main table."""
    name = config.experiment
    if name == "fig2":
        return run_fig2(config)
    if name == "laplacian":
        return run_laplacian(config)[0]
    if name == "svd":
        return run_svd_experiment(config)
    if name == "sturm":
        return run_sturm(config)[0]
    raise ValidationError("bounds-on-file is run through bounds_on_file")
