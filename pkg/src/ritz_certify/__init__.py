"""Rayleigh-Ritz with certified a-posteriori error bounds.

The main entry points are :func:`rr_decompose` for the projection, the gap
helpers in :mod:`ritz_certify.gap_model` and the bound families in
:mod:`ritz_certify.bounds_eigen`, :mod:`ritz_certify.bounds_subspace` and
:mod:`ritz_certify.bounds_svd`.
"""
from .bounds_eigen import BoundReport, eigen_bounds, partition_sweep
from .bounds_subspace import dk_recovery, subspace_bounds, subspace_inputs
from .bounds_svd import project_svd, svd_bounds, svd_gaps
from .errors import NumericalError, RitzCertifyError, ValidationError
from .gap_model import GapData, estimated_gaps, exact_gaps
from .lobpcg import lobpcg_run
from .matrix_core import SymmetricProblem, principal_angles, symmetric_eig
from .rayleigh_ritz import RitzDecomposition, rr_decompose

__all__ = [
    "BoundReport", "GapData", "NumericalError", "RitzCertifyError", "RitzDecomposition",
    "SymmetricProblem", "ValidationError", "dk_recovery", "eigen_bounds", "estimated_gaps",
    "exact_gaps", "lobpcg_run", "partition_sweep", "principal_angles", "project_svd",
    "rr_decompose", "subspace_bounds", "subspace_inputs", "svd_bounds", "svd_gaps",
    "symmetric_eig",
]
__version__ = "0.1.0"
