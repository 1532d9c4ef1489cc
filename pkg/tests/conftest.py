import numpy as np
import pytest

from ritz_certify.matrix_core import SymmetricProblem


def random_symmetric(rng, n, spread=1.0):
    """Random symmetric matrix with Haar eigenvectors and eigenvalues spread over ``[0, spread * n]``."""
    Q = np.linalg.qr(rng.standard_normal((n, n)))[0]
    w = np.sort(rng.uniform(0.0, spread * n, n))
    return (Q * w) @ Q.T


def near_basis(rng, V, noise):
    """Orthonormal basis close to ``span(V)``."""
    return np.linalg.qr(V + noise * rng.standard_normal(V.shape))[0]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def two_by_two():
    return SymmetricProblem.from_dense([[0.0, 0.1], [0.1, 1.0]])


# Acceptance reporting: one PASS/FAIL line per criterion in the terminal summary.

_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    label = report.nodeid.split("test_criterion_")[1]
    crit = label.rstrip("abcdefghijklmnopqrstuvwxyz")
    detail = dict(report.user_properties).get("detail", "")
    _ACCEPTANCE.setdefault(crit, []).append((label, report.passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit in sorted(_ACCEPTANCE, key=int):
        parts = _ACCEPTANCE[crit]
        ok = all(p for _, p, _ in parts)
        tr.write_line(f"criterion {crit}: {'PASS' if ok else 'FAIL'}")
        for label, passed, detail in parts:
            if len(parts) > 1 or detail:
                tr.write_line(f"    {label}: {'PASS' if passed else 'FAIL'}  {detail}".rstrip())
