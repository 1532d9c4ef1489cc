"""File readers for matrices and bases (MatrixMarket and plain CSV)."""
from __future__ import annotations

import io
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse

from .errors import ParseError
from .matrix_core import SymmetricProblem, _check_size


def read_matrix_market(path):
    """Dense array from a MatrixMarket file (coordinate or array; any symmetry)."""
    try:
        M = scipy.io.mmread(str(path))
    except (OSError, ValueError, IndexError, TypeError) as exc:
        raise ParseError(f"cannot parse MatrixMarket file {path}: {exc}") from exc
    if scipy.sparse.issparse(M):
        _check_size(*M.shape)
        M = M.toarray()
    M = np.asarray(M)
    if np.iscomplexobj(M):
        raise ParseError(f"{path}: complex matrices are not supported")
    return M.astype(float)


def read_csv_array(path):
    """Dense row-major array from CSV; an optional first line ``n,k`` is a shape header."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ParseError(f"{path}: empty file")
    shape = None
    head = [t.strip() for t in lines[0].split(",")]
    if len(head) == 2 and all(t.isdigit() for t in head):
        shape = (int(head[0]), int(head[1]))
        lines = lines[1:]
    try:
        data = np.loadtxt(io.StringIO("\n".join(lines)), delimiter=",", ndmin=2)
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if shape is not None and data.shape != shape:
        raise ParseError(f"{path}: header says {shape}, data has shape {data.shape}")
    return data


def read_array(path):
    """Dispatch on extension: ``.mtx`` goes to MatrixMarket, everything else to CSV."""
    if str(path).lower().endswith(".mtx"):
        return read_matrix_market(path)
    return read_csv_array(path)


def read_symmetric(path):
    M = read_array(path)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ParseError(f"{path}: expected a square matrix, got shape {M.shape}")
    return SymmetricProblem.from_dense(M)
