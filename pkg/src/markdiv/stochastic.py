"""
Classical counterpart: stochastic matrices and transition-rate matrices.

Convention: **row-stochastic**.  ``S_ij >= 0`` and every *row* sums to one;
a rate matrix ``Q`` has non-negative off-diagonal entries and zero row sums,
so ``e^{tQ}`` is row-stochastic for all ``t >= 0``.  Matrices in the
column-stochastic convention must be transposed before use.

The class ``G_c`` (``0 < c <= 1``) collects rate matrices whose diagonal
entries all lie within a factor ``c`` of the most negative one.  Products of
exponentials of ``G_c`` members satisfy

    det S <= s_1(S) ** ((1 + c (d - 1)) / 2).
"""

import csv
import math
from typing import NamedTuple

import numpy as np

from .criteria import REPORT_TOL, ChannelSpectrum, CriterionReport, bound_report
from .errors import (
    COutOfRangeError,
    DimTooSmallError,
    NonFiniteError,
    NonSquareError,
    NotInClassError,
    NotRateMatrixError,
    NotStochasticError,
    ParseError,
)
from .matcore import ZERO_SV_RTOL, hermitian_eigenvalues_ascending, matrix_exp

__all__ = [
    "ROW_SUM_TOL",
    "NONNEG_TOL",
    "as_stochastic",
    "as_rate_matrix",
    "in_class_c",
    "counterexample_matrix",
    "GerschgorinBound",
    "gerschgorin_lower_bound",
    "classical_exponent",
    "classical_power_criterion",
    "spectral_condition_classical",
    "random_rate_matrix",
    "random_gc_member",
    "read_csv_matrix",
    "stochastic_exp",
]

ROW_SUM_TOL = 1e-10
NONNEG_TOL = 1e-12


def _real_square(M) -> np.ndarray:
    A = np.asarray(M)
    if np.iscomplexobj(A):
        if np.any(A.imag != 0):
            raise ValueError("classical matrices must be real")
        A = A.real
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.size == 0:
        raise NonSquareError(f"expected a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NonFiniteError("matrix has non-finite entries")
    return A


def as_stochastic(S, *, row_tol=ROW_SUM_TOL, nonneg_tol=NONNEG_TOL) -> np.ndarray:
    """Validate a row-stochastic matrix and return it as a float array."""
    S = _real_square(S)
    if S.min() < -nonneg_tol:
        raise NotStochasticError(f"negative entry {S.min():.3e}")
    dev = np.abs(S.sum(axis=1) - 1.0).max()
    if dev > row_tol:
        raise NotStochasticError(f"row sums deviate from 1 by {dev:.3e}")
    return S


def as_rate_matrix(Q, *, row_tol=ROW_SUM_TOL, nonneg_tol=NONNEG_TOL) -> np.ndarray:
    """Validate a transition-rate matrix and return it as a float array."""
    Q = _real_square(Q)
    off = Q - np.diag(np.diag(Q))
    if off.min() < -nonneg_tol:
        raise NotRateMatrixError(f"negative off-diagonal entry {off.min():.3e}")
    if np.diag(Q).max() > nonneg_tol:
        raise NotRateMatrixError("positive diagonal entry")
    scale = max(1.0, np.abs(Q).max())
    dev = np.abs(Q.sum(axis=1)).max()
    if dev > row_tol * scale:
        raise NotRateMatrixError(f"row sums deviate from 0 by {dev:.3e}")
    return Q


def _check_c(c):
    if not 0 < c <= 1:
        raise COutOfRangeError(f"c={c} outside (0, 1]")


def in_class_c(Q, c: float, *, tol=NONNEG_TOL) -> bool:
    """``Q_kk <= c * min_l Q_ll`` for every ``k``."""
    _check_c(c)
    diag = np.diag(as_rate_matrix(Q))
    return bool(np.all(diag <= c * diag.min() + tol))


def counterexample_matrix(d: int) -> np.ndarray:
    """Rate matrix with one active row: ``Q_11 = -1``, ``Q_1d = 1``."""
    if d < 2:
        raise DimTooSmallError(f"d={d} < 2")
    Q = np.zeros((d, d))
    Q[0, 0], Q[0, d - 1] = -1.0, 1.0
    return Q


class GerschgorinBound(NamedTuple):
    bound: float
    smallest_eigenvalue: float


def gerschgorin_lower_bound(Q) -> GerschgorinBound:
    """``4 min_l Q_ll`` together with the actual ``lambda_min(Q + Q^T)``.

    The disc estimate is only valid when the column sums of ``Q`` vanish as
    well (e.g. symmetric ``Q``): the off-diagonal row sums of ``Q + Q^T`` are
    ``|Q_ll|`` plus the inflow into ``l``.  Both numbers are returned so that
    callers can see when the estimate fails.
    """
    Q = as_rate_matrix(Q)
    lam = hermitian_eigenvalues_ascending(Q + Q.T).values[0]
    return GerschgorinBound(4.0 * float(np.diag(Q).min()), float(lam))


def classical_exponent(d: int, c: float) -> float:
    _check_c(c)
    return (1 + c * (d - 1)) / 2


def _real_spectrum(S) -> ChannelSpectrum:
    d = S.shape[0]
    s = np.sort(np.linalg.svd(S, compute_uv=False))
    if s[-1] == 0 or s[0] < ZERO_SV_RTOL * s[-1]:
        return ChannelSpectrum(d, s, 0.0, -math.inf)
    sign, logdet = np.linalg.slogdet(S)
    return ChannelSpectrum(d, s, float(sign), float(np.sum(np.log(s))))


def classical_power_criterion(S, c: float, *, report_tol=REPORT_TOL) -> CriterionReport:
    """``det S <= s_1(S) ** ((1 + c (d - 1)) / 2)`` in the log domain.

    A non-positive determinant satisfies the bound trivially (the classical
    statement carries no sign condition).
    """
    S = as_stochastic(S)
    p = classical_exponent(S.shape[0], c)
    spec = _real_spectrum(S)
    cid = f"ClassicalPower({c!r})"
    report = bound_report(spec, cid, 1, p, report_tol=report_tol, require_nonneg_det=False)
    if spec.det_sign < 0:
        report.verdict = "Satisfied"
        report.flags.append("negative_det")
    return report


def spectral_condition_classical(Q, c: float) -> float:
    """Slack ``Tr[Q + Q^T] - (1 + c (d - 1))/2 * lambda_min(Q + Q^T)``."""
    if not in_class_c(Q, c):
        raise NotInClassError(f"Q is not in G_c for c={c}")
    Q = np.asarray(Q, dtype=float)
    Hs = Q + Q.T
    lam = hermitian_eigenvalues_ascending(Hs).values[0]
    return float(np.trace(Hs) - classical_exponent(Q.shape[0], c) * lam)


def random_rate_matrix(d: int, rng, *, scale=1.0) -> np.ndarray:
    """Rate matrix with exponential off-diagonal rates."""
    Q = rng.exponential(scale, size=(d, d))
    np.fill_diagonal(Q, 0.0)
    np.fill_diagonal(Q, -Q.sum(axis=1))
    return Q


def random_gc_member(d: int, c: float, rng) -> np.ndarray:
    """Random element of ``G_c``.

    Diagonal magnitudes are uniform in ``[c m, m]`` for ``m`` uniform in
    ``(0, 2]``, which keeps every ratio to the largest magnitude above ``c``.
    Each row's mass is spread over the off-diagonal entries with Dirichlet
    weights.
    """
    _check_c(c)
    if d < 2:
        raise DimTooSmallError(f"d={d} < 2")
    m = 2.0 * (1.0 - rng.random())
    mags = rng.uniform(c * m, m, size=d)
    Q = np.zeros((d, d))
    for i in range(d):
        w = rng.dirichlet(np.ones(d - 1))
        Q[i, np.arange(d) != i] = mags[i] * w
        Q[i, i] = -mags[i]
    return Q


def read_csv_matrix(path) -> np.ndarray:
    """Headerless d x d grid of real numbers."""
    try:
        with open(path, newline="") as fh:
            rows = [[float(x) for x in row] for row in csv.reader(fh) if row]
    except (OSError, ValueError) as exc:
        raise ParseError(f"cannot read CSV matrix {path}: {exc}") from exc
    if not rows or any(len(r) != len(rows) for r in rows):
        raise ParseError(f"{path}: expected a square grid")
    return np.array(rows)


def stochastic_exp(Q) -> np.ndarray:
    """``e^Q`` as a real array."""
    return matrix_exp(as_rate_matrix(Q)).real
